#include "odoq/proxy.hpp"

#include <algorithm>

namespace odoq::proxy {

std::string_view to_string(DenyReason reason) {
  switch (reason) {
    case DenyReason::kNotAllowed: return "not-allowed";
    case DenyReason::kMalformed: return "malformed";
    case DenyReason::kBusy: return "busy";
  }
  return "unknown";
}

Core::Core(Config config) : config_(std::move(config)) {
  if (config_.allowed_resolvers.empty()) {
    throw Error("proxy needs at least one allowed resolver");
  }
}

ForwardDecision Core::on_client_query(const env::Envelope& e,
                                      ClientChannel channel) {
  if (e.msg_type != env::MsgType::kObliviousQuery || e.target_uri.empty() ||
      e.payload.empty()) {
    return Deny{DenyReason::kMalformed};
  }
  if (std::find(config_.allowed_resolvers.begin(), config_.allowed_resolvers.end(),
                e.target_uri) == config_.allowed_resolvers.end()) {
    return Deny{DenyReason::kNotAllowed};
  }

  std::lock_guard lock(mutex_);
  SlotId slot = 0;
  for (const auto& [id, s] : slots_) {
    if (s.client_channel == channel && s.resolver_uri == e.target_uri) {
      slot = id;  // live slot kept by a KEY_UPDATE: the retry reuses it
      break;
    }
  }
  if (slot == 0) {
    if (slots_.size() >= config_.max_slots) {
      return Deny{DenyReason::kBusy};
    }
    slot = next_slot_++;
    slots_.emplace(slot, Slot{channel, e.target_uri});
  }

  Forward out;
  out.resolver_uri = e.target_uri;
  out.envelope = env::strip_target(e);
  out.slot = slot;
  return out;
}

RelayDecision Core::on_resolver_reply(SlotId slot, const env::Envelope& e) {
  if (e.msg_type != env::MsgType::kObliviousResponse &&
      e.msg_type != env::MsgType::kKeyUpdate) {
    return UnknownSlot{};
  }
  std::lock_guard lock(mutex_);
  auto it = slots_.find(slot);
  if (it == slots_.end()) {
    return UnknownSlot{};
  }
  Relay out;
  out.client_channel = it->second.client_channel;
  out.envelope = e;
  out.slot_retired = (e.msg_type == env::MsgType::kObliviousResponse);
  if (out.slot_retired) {
    slots_.erase(it);
  }
  return out;
}

void Core::retire(SlotId slot) {
  std::lock_guard lock(mutex_);
  slots_.erase(slot);
}

void Core::retire_channel(ClientChannel channel) {
  std::lock_guard lock(mutex_);
  std::erase_if(slots_, [channel](const auto& entry) {
    return entry.second.client_channel == channel;
  });
}

size_t Core::live_slots() const {
  std::lock_guard lock(mutex_);
  return slots_.size();
}

}  // namespace odoq::proxy
