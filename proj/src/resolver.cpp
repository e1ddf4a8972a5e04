#include "odoq/resolver.hpp"

#include <sstream>

namespace odoq::resolver {

void ZoneStore::add(const dns::Name& name, const std::array<uint8_t, 4>& addr,
                    uint32_t ttl) {
  ZoneRecord& rec = a_records_[name.lowered()];
  rec.addrs.push_back(addr);
  rec.ttl = ttl;
}

const ZoneRecord* ZoneStore::find_a(const dns::Name& name) const {
  auto it = a_records_.find(name.lowered());
  return it == a_records_.end() ? nullptr : &it->second;
}

ZoneStore load_zone(std::string_view text) {
  ZoneStore zone;
  size_t line_no = 0;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;
    if (end == text.size() && line.empty()) break;

    size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);

    std::istringstream fields{std::string(line)};
    std::string name_text, type_text, value_text, ttl_text, extra;
    if (!(fields >> name_text)) continue;  // blank or comment-only line
    if (!(fields >> type_text >> value_text)) {
      throw ParseError(line_no, "expected `<name> <TYPE> <value> [ttl]`");
    }
    uint32_t ttl = 300;
    if (fields >> ttl_text) {
      try {
        size_t used = 0;
        unsigned long v = std::stoul(ttl_text, &used);
        if (used != ttl_text.size() || v > 0xffffffffUL) throw std::invalid_argument("");
        ttl = static_cast<uint32_t>(v);
      } catch (const std::exception&) {
        throw ParseError(line_no, "bad ttl");
      }
    }
    if (fields >> extra) throw ParseError(line_no, "trailing fields");
    if (type_text != "A") throw ParseError(line_no, "only TYPE A supported");

    try {
      zone.add(dns::Name::parse(name_text), dns::parse_ipv4(value_text), ttl);
    } catch (const Error& err) {
      throw ParseError(line_no, err.what());
    }
  }
  return zone;
}

std::vector<std::array<uint8_t, 4>> lookup(const ZoneStore& zone,
                                           const dns::Name& name) {
  const ZoneRecord* rec = zone.find_a(name);
  return rec == nullptr ? std::vector<std::array<uint8_t, 4>>{} : rec->addrs;
}

bool NonceCache::check_and_insert(
    const std::array<uint8_t, seal::kNonceSize>& nonce) {
  if (seen_.contains(nonce)) return true;
  if (order_.size() >= capacity_) {
    seen_.erase(order_.front());
    order_.pop_front();
  }
  order_.push_back(nonce);
  seen_.insert(nonce);
  return false;
}

Core::Core(seal::ResolverKeyPair initial, ZoneStore zone)
    : current_(std::move(initial)), zone_(std::move(zone)) {}

env::Envelope Core::handle_query(const env::Envelope& e) {
  if (e.msg_type != env::MsgType::kObliviousQuery) {
    throw MalformedEnvelope("expected an oblivious query");
  }

  seal::SealedRequest sealed;
  try {
    sealed = seal::decode_sealed_request(e.payload);
  } catch (const Error&) {
    throw MalformedEnvelope("payload is not a sealed request");
  }

  // Snapshot the key pair so a concurrent rotation cannot change it under
  // this open.
  seal::ResolverKeyPair keypair;
  {
    std::lock_guard lock(mutex_);
    keypair = current_;
  }

  seal::OpenedRequest opened;
  try {
    opened = seal::open_request(keypair, sealed);
  } catch (const Error&) {
    // Any failure to open gets the current public key back.
    std::lock_guard lock(mutex_);
    ++stats_.key_updates;
    return env::make_key_update(seal::encode_key_config(current_.config));
  }

  dns::Message query;
  try {
    query = dns::decode_message(opened.query_wire);
  } catch (const Error&) {
    throw MalformedEnvelope("sealed payload is not a DNS query");
  }
  if (query.is_response) throw MalformedEnvelope("sealed payload is a response");

  bool replay;
  {
    std::lock_guard lock(mutex_);
    replay = seen_nonces_.check_and_insert(opened.secrets.nonce);
    if (replay) {
      ++stats_.replays;
    }
  }

  dns::Message response;
  if (replay) {
    response = dns::make_error_response(query, dns::kRcodeServFail);
  } else if (query.question.qtype != dns::kTypeA ||
             query.question.qclass != dns::kClassIn) {
    response = dns::make_error_response(query, dns::kRcodeNotImp);
  } else {
    const ZoneRecord* rec = zone_.find_a(query.question.name);
    if (rec == nullptr) {
      response = dns::make_a_response(query, {});
    } else {
      response = dns::make_a_response(query, rec->addrs, rec->ttl);
    }
  }

  seal::SealedResponse sealed_response = seal::seal_response(
      opened.secrets, dns::encode_message(response), query.question.name);
  if (!replay) {
    std::lock_guard lock(mutex_);
    ++stats_.answered;
  }
  return env::make_response(std::move(sealed_response.ciphertext));
}

void Core::rotate_keys(RandomSource& rng) {
  std::lock_guard lock(mutex_);
  uint8_t next_id = static_cast<uint8_t>(current_.config.key_id + 1);
  seal::Suite suite{current_.config.kem_id, current_.config.kdf_id,
                    current_.config.aead_id};
  seal::ResolverKeyPair fresh = seal::generate_keypair(suite, next_id, rng);
  previous_ = std::move(current_);
  current_ = std::move(fresh);
}

seal::KeyConfig Core::config() const {
  std::lock_guard lock(mutex_);
  return current_.config;
}

std::optional<seal::KeyConfig> Core::previous_config() const {
  std::lock_guard lock(mutex_);
  return previous_ ? std::optional(previous_->config) : std::nullopt;
}

seal::ResolverKeyPair Core::current_keypair() const {
  std::lock_guard lock(mutex_);
  return current_;
}

void Core::set_keypair(seal::ResolverKeyPair kp) {
  std::lock_guard lock(mutex_);
  current_ = std::move(kp);
  previous_.reset();
}

Core::Stats Core::stats() const {
  std::lock_guard lock(mutex_);
  return stats_;
}

}  // namespace odoq::resolver
