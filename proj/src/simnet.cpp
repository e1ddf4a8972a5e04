#include "odoq/simnet.hpp"

namespace odoq::sim {

Bytes Transcript::concatenated() const {
  Bytes out;
  for (const auto& entry : entries) {
    out.insert(out.end(), entry.bytes.begin(), entry.bytes.end());
  }
  return out;
}

Bytes Transcript::concatenated(Direction direction) const {
  Bytes out;
  for (const auto& entry : entries) {
    if (entry.direction != direction) continue;
    out.insert(out.end(), entry.bytes.begin(), entry.bytes.end());
  }
  return out;
}

Sim::Sim(const TopologySpec& spec) {
  for (const auto& node : spec.nodes) {
    if (roles_.contains(node.id)) throw DuplicateNode("duplicate node " + node.id);
    roles_[node.id] = node.role;
    node_order_.push_back(node.id);
    transcripts_[node.id].node_id = node.id;
  }
  for (const auto& link : spec.links) {
    if (!roles_.contains(link.a)) throw UnknownEndpoint("unknown node " + link.a);
    if (!roles_.contains(link.b)) throw UnknownEndpoint("unknown node " + link.b);
    link_latencies_[pair_key(link.a, link.b)] = link.latency_ms;
  }
}

void Sim::bind(const std::string& node_id, Handler handler) {
  if (!roles_.contains(node_id)) throw UnknownEndpoint("unknown node " + node_id);
  handlers_[node_id] = std::move(handler);
}

std::pair<std::string, std::string> Sim::pair_key(const std::string& a,
                                                  const std::string& b) {
  return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

uint64_t Sim::link_latency(const std::string& a, const std::string& b) const {
  auto it = link_latencies_.find(pair_key(a, b));
  if (it == link_latencies_.end()) {
    throw UnknownEndpoint("no link between " + a + " and " + b);
  }
  return it->second;
}

void Sim::schedule(uint64_t at, std::function<void(Sim&)> action) {
  queue_.push(Event{at, next_seq_++, std::move(action)});
}

void Sim::after(uint64_t delay_ms, std::function<void(Sim&)> fn) {
  schedule(now_ + delay_ms, std::move(fn));
}

void Sim::set_interceptor(Interceptor interceptor) {
  interceptor_ = std::move(interceptor);
}

void Sim::send(const std::string& from, const std::string& to, Bytes bytes) {
  uint64_t latency = link_latency(from, to);

  auto key = pair_key(from, to);
  if (establishments_[key] == 0) establishments_[key] = 1;
  ++message_counts_[{from, to}];

  transcripts_[from].entries.push_back(
      {now_, Direction::kSent, to, bytes});

  std::vector<Bytes> copies{std::move(bytes)};
  if (interceptor_) {
    if (auto replaced = interceptor_(from, to, copies.front())) {
      copies = std::move(*replaced);
    }
  }

  for (auto& copy : copies) {
    schedule(now_ + latency,
             [from, to, latency, data = std::move(copy)](Sim& sim) {
               sim.transcripts_[to].entries.push_back(
                   {sim.now_, Direction::kReceived, from, data});
               ++sim.deliveries_;
               sim.delivered_latency_sum_ += latency;
               auto handler = sim.handlers_.find(to);
               if (handler != sim.handlers_.end() && handler->second) {
                 handler->second(sim, from, data);
               }
             });
  }
}

void Sim::run() {
  while (!queue_.empty()) {
    Event event = queue_.top();
    queue_.pop();
    now_ = event.time;
    event.action(*this);
  }
}

bool Sim::has_node(const std::string& node_id) const {
  return roles_.contains(node_id);
}

Role Sim::role(const std::string& node_id) const {
  auto it = roles_.find(node_id);
  if (it == roles_.end()) throw UnknownEndpoint("unknown node " + node_id);
  return it->second;
}

const Transcript& Sim::transcript(const std::string& node_id) const {
  auto it = transcripts_.find(node_id);
  if (it == transcripts_.end()) throw UnknownEndpoint("unknown node " + node_id);
  return it->second;
}

uint64_t Sim::establishments(const std::string& a, const std::string& b) const {
  auto it = establishments_.find(pair_key(a, b));
  return it == establishments_.end() ? 0 : it->second;
}

uint64_t Sim::message_count(const std::string& from, const std::string& to) const {
  auto it = message_counts_.find({from, to});
  return it == message_counts_.end() ? 0 : it->second;
}

}  // namespace odoq::sim
