#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "odoq/dns.hpp"
#include "odoq/envelope.hpp"
#include "odoq/random.hpp"
#include "odoq/seal.hpp"

// Client state machine. One session = one domain resolution: seal and send
// the query, verify the response (domain, nonce, txid), and recover once
// from a resolver key rotation by re-sealing the identical query under the
// key carried in a KEY_UPDATE.

namespace odoq::client {

enum class State {
  kAwaitingResponse,
  kDone,
  kFailed,
};

enum class RejectReason {
  kDecryptFailure,
  kDomainMismatch,
  kNonceMismatch,
  kTxidMismatch,
  kMalformedResponse,
  kServerFailure,     // verified response with an unexpected rcode
  kSecondKeyUpdate,
  kMalformedKeyUpdate,
  kUnexpectedMessage,
};

std::string_view to_string(RejectReason reason);

struct Answer {
  std::vector<std::array<uint8_t, 4>> addresses;
  uint32_t ttl = 0;
};

// Verified response with rcode NXDOMAIN: the name does not exist.
struct NameError {};

// A KEY_UPDATE was accepted; send this envelope to continue the session.
struct Retry {
  env::Envelope envelope;
};

struct Reject {
  RejectReason reason;
};

using Outcome = std::variant<Answer, NameError, Retry, Reject>;

class Session {
 public:
  // Builds the session and the initial OBLIVIOUS_QUERY envelope.
  static std::pair<Session, env::Envelope> start(const dns::Name& domain,
                                                 std::string resolver_uri,
                                                 seal::KeyConfig key_config,
                                                 RandomSource& rng);

  // Feed the reply received from the proxy. All failures are Reject
  // outcomes; only the first KEY_UPDATE yields a Retry.
  Outcome on_envelope(const env::Envelope& e);

  State state() const { return state_; }
  bool retried() const { return retried_; }
  const dns::Name& domain() const { return domain_; }
  const dns::Message& query() const { return query_; }
  const seal::SessionSecrets& secrets() const { return secrets_; }
  const seal::KeyConfig& key_config() const { return key_config_; }

 private:
  Session() = default;

  Outcome reject(RejectReason reason);
  Outcome handle_response(const env::Envelope& e);
  Outcome handle_key_update(const env::Envelope& e);

  dns::Name domain_;
  std::string resolver_uri_;
  seal::KeyConfig key_config_;
  seal::SessionSecrets secrets_;
  dns::Message query_;
  Bytes query_wire_;
  std::array<uint8_t, 32> retry_ikm_{};  // ephemeral-key seed for the one retry
  State state_ = State::kAwaitingResponse;
  bool retried_ = false;
};

}  // namespace odoq::client
