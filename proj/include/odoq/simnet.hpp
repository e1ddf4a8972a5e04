#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "odoq/bytes.hpp"
#include "odoq/errors.hpp"

// Deterministic in-process network: named nodes, fixed-latency links, a
// virtual-time event queue, and per-node byte transcripts. All protocol
// randomness in a scenario comes from one seeded generator, so identical
// scenario + seed reproduces identical transcripts byte for byte.

namespace odoq::sim {

class DuplicateNode : public Error {
 public:
  using Error::Error;
};

class UnknownEndpoint : public Error {
 public:
  using Error::Error;
};

enum class Role {
  kClient,
  kProxy,
  kResolver,
};

struct NodeSpec {
  std::string id;
  Role role;
};

struct LinkSpec {
  std::string a;
  std::string b;
  uint64_t latency_ms = 0;
};

struct TopologySpec {
  std::vector<NodeSpec> nodes;
  std::vector<LinkSpec> links;
};

enum class Direction {
  kSent,
  kReceived,
};

struct TranscriptEntry {
  uint64_t time_ms = 0;
  Direction direction = Direction::kSent;
  std::string peer;
  Bytes bytes;
};

struct Transcript {
  std::string node_id;
  std::vector<TranscriptEntry> entries;
  // Every byte this node saw on the wire, in transcript order.
  Bytes concatenated() const;
  Bytes concatenated(Direction direction) const;
};

class Sim {
 public:
  explicit Sim(const TopologySpec& spec);

  using Handler = std::function<void(Sim&, const std::string& from, const Bytes&)>;
  void bind(const std::string& node_id, Handler handler);

  // Schedules delivery after the link latency. The first traffic over a
  // node pair counts as one connection establishment; replies reuse it.
  void send(const std::string& from, const std::string& to, Bytes bytes);

  // Timer for scripted events (rotations, duplicate injections).
  void after(uint64_t delay_ms, std::function<void(Sim&)> fn);

  // In-flight mutation hook: return a replacement list for the bytes about
  // to be delivered ({} drops, one entry replaces, two duplicate), or
  // nullopt to pass through.
  using Interceptor = std::function<std::optional<std::vector<Bytes>>(
      const std::string& from, const std::string& to, const Bytes& bytes)>;
  void set_interceptor(Interceptor interceptor);

  // Drains the event queue.
  void run();

  uint64_t now() const { return now_; }
  uint64_t deliveries() const { return deliveries_; }
  uint64_t delivered_latency_sum() const { return delivered_latency_sum_; }

  bool has_node(const std::string& node_id) const;
  Role role(const std::string& node_id) const;
  const Transcript& transcript(const std::string& node_id) const;
  const std::vector<std::string>& node_ids() const { return node_order_; }

  uint64_t establishments(const std::string& a, const std::string& b) const;
  const std::map<std::pair<std::string, std::string>, uint64_t>&
  all_establishments() const {
    return establishments_;
  }
  uint64_t message_count(const std::string& from, const std::string& to) const;

 private:
  struct Event {
    uint64_t time = 0;
    uint64_t seq = 0;
    std::function<void(Sim&)> action;
  };
  struct EventOrder {
    bool operator()(const Event& a, const Event& b) const {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };

  uint64_t link_latency(const std::string& a, const std::string& b) const;
  void schedule(uint64_t at, std::function<void(Sim&)> action);
  static std::pair<std::string, std::string> pair_key(const std::string& a,
                                                      const std::string& b);

  uint64_t now_ = 0;
  uint64_t next_seq_ = 0;
  uint64_t deliveries_ = 0;
  uint64_t delivered_latency_sum_ = 0;
  std::priority_queue<Event, std::vector<Event>, EventOrder> queue_;
  std::vector<std::string> node_order_;
  std::map<std::string, Role> roles_;
  std::map<std::string, Handler> handlers_;
  std::map<std::string, Transcript> transcripts_;
  std::map<std::pair<std::string, std::string>, uint64_t> link_latencies_;
  std::map<std::pair<std::string, std::string>, uint64_t> establishments_;
  std::map<std::pair<std::string, std::string>, uint64_t> message_counts_;
  Interceptor interceptor_;
};

}  // namespace odoq::sim
