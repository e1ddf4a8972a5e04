#pragma once

#include <cstdint>
#include <mutex>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "odoq/envelope.hpp"

// Oblivious relay. Forwards sealed payloads to allowlisted resolvers and
// relays replies back, byte-identical both ways. This module deliberately
// has no dependency on the seal module: the proxy cannot open anything.

namespace odoq::proxy {

using SlotId = uint64_t;
// Opaque handle the embedding uses to route replies back; a node id in the
// simulator, a connection id on the real transport. Never a network address
// stored next to forwarded bytes.
using ClientChannel = uint64_t;

struct Config {
  std::vector<std::string> allowed_resolvers;
  size_t max_slots = 4096;
};

enum class DenyReason {
  kNotAllowed,
  kMalformed,
  kBusy,
};

std::string_view to_string(DenyReason reason);

struct Forward {
  std::string resolver_uri;
  env::Envelope envelope;  // target stripped, payload byte-identical
  SlotId slot = 0;
};

struct Deny {
  DenyReason reason;
};

using ForwardDecision = std::variant<Forward, Deny>;

struct Relay {
  ClientChannel client_channel = 0;
  env::Envelope envelope;  // payload byte-identical
  bool slot_retired = false;
};

struct UnknownSlot {};

using RelayDecision = std::variant<Relay, UnknownSlot>;

class Core {
 public:
  explicit Core(Config config);

  // Decide what to do with a client query. A retry from the same channel to
  // the same resolver reuses its live slot (kept alive by a KEY_UPDATE).
  ForwardDecision on_client_query(const env::Envelope& e, ClientChannel channel);

  // Route a resolver reply back. OBLIVIOUS_RESPONSE retires the slot;
  // KEY_UPDATE keeps it alive for the retry.
  RelayDecision on_resolver_reply(SlotId slot, const env::Envelope& e);

  // Drop a slot whose exchange failed (resolver unreachable, timeout).
  void retire(SlotId slot);
  // Drop every slot belonging to a client channel that went away.
  void retire_channel(ClientChannel channel);

  size_t live_slots() const;

 private:
  struct Slot {
    ClientChannel client_channel = 0;
    std::string resolver_uri;
  };

  Config config_;
  mutable std::mutex mutex_;
  std::unordered_map<SlotId, Slot> slots_;
  SlotId next_slot_ = 1;
};

}  // namespace odoq::proxy
