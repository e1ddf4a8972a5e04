#include "odoq/client.hpp"

#include <stdexcept>

namespace odoq::client {

std::string_view to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::kDecryptFailure: return "decrypt-failure";
    case RejectReason::kDomainMismatch: return "domain-mismatch";
    case RejectReason::kNonceMismatch: return "nonce-mismatch";
    case RejectReason::kTxidMismatch: return "txid-mismatch";
    case RejectReason::kMalformedResponse: return "malformed-response";
    case RejectReason::kServerFailure: return "server-failure";
    case RejectReason::kSecondKeyUpdate: return "second-key-update";
    case RejectReason::kMalformedKeyUpdate: return "malformed-key-update";
    case RejectReason::kUnexpectedMessage: return "unexpected-message";
  }
  return "unknown";
}

std::pair<Session, env::Envelope> Session::start(const dns::Name& domain,
                                                 std::string resolver_uri,
                                                 seal::KeyConfig key_config,
                                                 RandomSource& rng) {
  Session s;
  s.domain_ = domain;
  s.resolver_uri_ = std::move(resolver_uri);
  s.key_config_ = std::move(key_config);
  s.secrets_ = seal::SessionSecrets::generate(rng);
  s.query_ = dns::make_query(domain, dns::kTypeA, rng.u16());
  s.query_wire_ = dns::encode_message(s.query_);
  rng.fill(s.retry_ikm_);

  seal::SealedRequest sealed =
      seal::seal_request(s.key_config_, s.query_wire_, s.secrets_, rng);
  env::Envelope envelope =
      env::make_query(s.resolver_uri_, seal::encode_sealed_request(sealed));
  return {std::move(s), std::move(envelope)};
}

Outcome Session::reject(RejectReason reason) {
  state_ = State::kFailed;
  return Reject{reason};
}

Outcome Session::on_envelope(const env::Envelope& e) {
  if (state_ != State::kAwaitingResponse) {
    throw std::logic_error("session is not awaiting a response");
  }
  switch (e.msg_type) {
    case env::MsgType::kObliviousResponse:
      return handle_response(e);
    case env::MsgType::kKeyUpdate:
      return handle_key_update(e);
    default:
      return reject(RejectReason::kUnexpectedMessage);
  }
}

Outcome Session::handle_response(const env::Envelope& e) {
  seal::OpenedResponse opened;
  try {
    opened = seal::open_response(secrets_, seal::SealedResponse{e.payload});
  } catch (const Error&) {
    return reject(RejectReason::kDecryptFailure);
  }

  // Verify the sealed bindings before trusting anything in the body.
  dns::Name response_domain;
  try {
    response_domain = dns::Name::parse(opened.domain);
  } catch (const Error&) {
    return reject(RejectReason::kDomainMismatch);
  }
  if (!response_domain.equals_ci(domain_)) {
    return reject(RejectReason::kDomainMismatch);
  }
  if (opened.nonce != secrets_.nonce) {
    return reject(RejectReason::kNonceMismatch);
  }

  dns::Message response;
  try {
    response = dns::decode_message(opened.response_wire);
  } catch (const Error&) {
    return reject(RejectReason::kMalformedResponse);
  }
  if (!response.is_response) {
    return reject(RejectReason::kMalformedResponse);
  }
  if (response.txid != query_.txid) {
    return reject(RejectReason::kTxidMismatch);
  }

  if (response.rcode == dns::kRcodeNxDomain) {
    state_ = State::kDone;
    return NameError{};
  }
  if (response.rcode != dns::kRcodeNoError) {
    return reject(RejectReason::kServerFailure);
  }

  Answer answer;
  for (const auto& rr : response.answers) {
    if (rr.rtype == dns::kTypeA && rr.rclass == dns::kClassIn) {
      std::array<uint8_t, 4> addr{};
      std::copy(rr.rdata.begin(), rr.rdata.end(), addr.begin());
      answer.addresses.push_back(addr);
      if (answer.addresses.size() == 1) answer.ttl = rr.ttl;
    }
  }
  if (answer.addresses.empty()) {
    return reject(RejectReason::kMalformedResponse);
  }
  state_ = State::kDone;
  return answer;
}

Outcome Session::handle_key_update(const env::Envelope& e) {
  if (retried_) {
    return reject(RejectReason::kSecondKeyUpdate);
  }
  seal::KeyConfig new_config;
  try {
    new_config = seal::decode_key_config(e.payload);
  } catch (const Error&) {
    return reject(RejectReason::kMalformedKeyUpdate);
  }

  // Identical message transfer: same query bytes, same secrets, new key.
  key_config_ = std::move(new_config);
  seal::SealedRequest sealed =
      seal::seal_request_with_ikm(key_config_, query_wire_, secrets_, retry_ikm_);
  retried_ = true;
  return Retry{
      env::make_query(resolver_uri_, seal::encode_sealed_request(sealed))};
}

}  // namespace odoq::client
