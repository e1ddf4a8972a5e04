#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "odoq/dns.hpp"
#include "odoq/envelope.hpp"
#include "odoq/random.hpp"
#include "odoq/seal.hpp"

// Resolver stand-in: opens sealed requests, answers A queries from a local
// zone store, seals responses under the client's symmetric key, and serves
// a KEY_UPDATE whenever a request fails to decrypt (key rotation).

namespace odoq::resolver {

// Connection-level problem: the input is not a usable query envelope. The
// caller drops the exchange without replying.
class MalformedEnvelope : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(size_t line, const std::string& what)
      : Error("zone line " + std::to_string(line) + ": " + what), line_(line) {}
  size_t line() const { return line_; }

 private:
  size_t line_;
};

struct ZoneRecord {
  std::vector<std::array<uint8_t, 4>> addrs;
  uint32_t ttl = 300;
};

class ZoneStore {
 public:
  void add(const dns::Name& name, const std::array<uint8_t, 4>& addr, uint32_t ttl);
  // Case-insensitive exact match; nullptr means NXDOMAIN.
  const ZoneRecord* find_a(const dns::Name& name) const;
  size_t size() const { return a_records_.size(); }

 private:
  std::map<std::string, ZoneRecord> a_records_;  // keyed on lowered name
};

// One record per line: `<name> <TYPE> <value> [ttl]`. `#` starts a comment,
// blank lines are skipped, only TYPE A with a dotted quad is accepted.
// Duplicate (name, type) lines merge their rdata lists.
ZoneStore load_zone(std::string_view text);

std::vector<std::array<uint8_t, 4>> lookup(const ZoneStore& zone,
                                           const dns::Name& name);

// Bounded FIFO set of recently seen client nonces.
class NonceCache {
 public:
  explicit NonceCache(size_t capacity = 65536) : capacity_(capacity) {}
  // True if the nonce was already present; inserts it otherwise.
  bool check_and_insert(const std::array<uint8_t, seal::kNonceSize>& nonce);
  size_t size() const { return order_.size(); }

 private:
  size_t capacity_;
  std::deque<std::array<uint8_t, seal::kNonceSize>> order_;
  std::set<std::array<uint8_t, seal::kNonceSize>> seen_;
};

class Core {
 public:
  Core(seal::ResolverKeyPair initial, ZoneStore zone);

  // Handle a stripped OBLIVIOUS_QUERY envelope. Returns the reply envelope:
  // a sealed response, or a KEY_UPDATE iff the request failed to open.
  // Throws MalformedEnvelope when no reply is possible.
  env::Envelope handle_query(const env::Envelope& e);

  // Hard rotation: the previous key is kept for inspection but never used
  // to decrypt again.
  void rotate_keys(RandomSource& rng);

  seal::KeyConfig config() const;
  std::optional<seal::KeyConfig> previous_config() const;
  // Full current key pair, for operator persistence across restarts.
  seal::ResolverKeyPair current_keypair() const;
  void set_keypair(seal::ResolverKeyPair kp);

  struct Stats {
    uint64_t answered = 0;
    uint64_t key_updates = 0;
    uint64_t replays = 0;
  };
  Stats stats() const;

 private:
  mutable std::mutex mutex_;
  seal::ResolverKeyPair current_;
  std::optional<seal::ResolverKeyPair> previous_;
  ZoneStore zone_;
  NonceCache seen_nonces_;
  Stats stats_;
};

}  // namespace odoq::resolver
