#include "odoq/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <memory>
#include <set>
#include <sstream>

#include "odoq/client.hpp"
#include "odoq/proxy.hpp"
#include "odoq/random.hpp"
#include "odoq/resolver.hpp"

namespace odoq::sim {

namespace {

const std::set<std::string, std::less<>> kScripts = {
    "happy_path",       "nxdomain",        "key_rotation",
    "replay_duplicate", "tamper_response", "tamper_request",
    "deny_unlisted_resolver", "blackhole"};

bool expects_completion(std::string_view script) {
  return script == "happy_path" || script == "nxdomain" ||
         script == "key_rotation" || script == "replay_duplicate";
}

uint64_t parse_u64(std::string_view text, std::string_view key) {
  uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.begin(), text.end(), v);
  if (ec != std::errc() || ptr != text.end()) {
    throw Malformed("bad integer for " + std::string(key));
  }
  return v;
}

std::string type_name(env::MsgType t) {
  switch (t) {
    case env::MsgType::kObliviousQuery: return "QUERY";
    case env::MsgType::kObliviousResponse: return "RESPONSE";
    case env::MsgType::kKeyUpdate: return "KEY_UPDATE";
  }
  return "?";
}

struct ClientActor {
  std::string self;
  std::string proxy_node;
  std::optional<client::Session> session;
  std::string outcome = "none";
  std::vector<std::string> answers;
  uint64_t answer_time_ms = 0;
  uint64_t late_envelopes = 0;

  bool terminal() const {
    return session &&
           session->state() != client::State::kAwaitingResponse;
  }

  void handle(Sim& sim, const std::string&, const Bytes& bytes) {
    if (!session || terminal()) {
      ++late_envelopes;
      return;
    }
    env::Envelope e;
    try {
      e = env::decode_envelope(bytes);
    } catch (const Error&) {
      outcome = "reject:framing-error";
      return;
    }
    client::Outcome result = session->on_envelope(e);
    if (auto* answer = std::get_if<client::Answer>(&result)) {
      outcome = "answer";
      answer_time_ms = sim.now();
      for (const auto& addr : answer->addresses) {
        answers.push_back(dns::format_ipv4(addr));
      }
    } else if (std::get_if<client::NameError>(&result)) {
      outcome = "name_error";
      answer_time_ms = sim.now();
    } else if (auto* retry = std::get_if<client::Retry>(&result)) {
      sim.send(self, proxy_node, env::encode_envelope(retry->envelope));
    } else if (auto* rej = std::get_if<client::Reject>(&result)) {
      outcome = "reject:" + std::string(client::to_string(rej->reason));
    }
  }
};

struct ProxyActor {
  std::string self;
  proxy::Core core;
  std::map<std::string, proxy::ClientChannel> channel_by_node;
  std::map<proxy::ClientChannel, std::string> node_by_channel;
  proxy::ClientChannel next_channel = 1;
  // Replies come back over an ordered link, so in-flight slots per resolver
  // form a FIFO.
  std::map<std::string, std::deque<proxy::SlotId>> inflight;
  std::map<std::string, uint64_t> denials;
  uint64_t unknown_slots = 0;

  explicit ProxyActor(proxy::Config config) : core(std::move(config)) {}

  proxy::ClientChannel channel_for(const std::string& node) {
    auto it = channel_by_node.find(node);
    if (it != channel_by_node.end()) return it->second;
    proxy::ClientChannel ch = next_channel++;
    channel_by_node[node] = ch;
    node_by_channel[ch] = node;
    return ch;
  }

  void handle(Sim& sim, const std::string& from, const Bytes& bytes) {
    env::Envelope e;
    try {
      e = env::decode_envelope(bytes);
    } catch (const Error&) {
      ++denials["malformed"];
      return;
    }

    if (sim.role(from) == Role::kClient) {
      auto decision = core.on_client_query(e, channel_for(from));
      if (auto* deny = std::get_if<proxy::Deny>(&decision)) {
        ++denials[std::string(proxy::to_string(deny->reason))];
        return;
      }
      auto& fwd = std::get<proxy::Forward>(decision);
      std::string host = env::parse_target_uri(fwd.resolver_uri).host;
      if (!sim.has_node(host)) {
        ++denials["unreachable"];
        core.retire(fwd.slot);
        return;
      }
      inflight[host].push_back(fwd.slot);
      sim.send(self, host, env::encode_envelope(fwd.envelope));
      return;
    }

    // Resolver reply.
    auto& queue = inflight[from];
    if (queue.empty()) {
      ++unknown_slots;
      return;
    }
    proxy::SlotId slot = queue.front();
    queue.pop_front();
    auto decision = core.on_resolver_reply(slot, e);
    if (std::get_if<proxy::UnknownSlot>(&decision)) {
      ++unknown_slots;
      return;
    }
    auto& relay = std::get<proxy::Relay>(decision);
    sim.send(self, node_by_channel.at(relay.client_channel),
             env::encode_envelope(relay.envelope));
  }
};

struct ResolverActor {
  std::string self;
  resolver::Core core;
  uint64_t dropped = 0;

  ResolverActor(seal::ResolverKeyPair kp, resolver::ZoneStore zone)
      : core(std::move(kp), std::move(zone)) {}

  void handle(Sim& sim, const std::string& from, const Bytes& bytes) {
    try {
      env::Envelope e = env::decode_envelope(bytes);
      env::Envelope reply = core.handle_query(e);
      sim.send(self, from, env::encode_envelope(reply));
    } catch (const Error&) {
      ++dropped;  // connection-level error: no reply
    }
  }
};

// Flips one payload byte of matching envelopes in flight.
Sim::Interceptor make_tamper(env::MsgType victim_type, const std::string& from,
                             const std::string& to, uint32_t position,
                             uint8_t mask, ScenarioReport& report) {
  return [=, &report](const std::string& f, const std::string& t,
                      const Bytes& bytes) -> std::optional<std::vector<Bytes>> {
    if (f != from || t != to) return std::nullopt;
    env::Envelope e;
    try {
      e = env::decode_envelope(bytes);
    } catch (const Error&) {
      return std::nullopt;
    }
    if (e.msg_type != victim_type || e.payload.empty()) return std::nullopt;
    // Envelope header: version, type, target_len u16, target, payload_len u32.
    size_t payload_offset = 1 + 1 + 2 + e.target_uri.size() + 4;
    size_t index = position % e.payload.size();
    Bytes tampered = bytes;
    tampered[payload_offset + index] ^= mask;
    report.tamper_position = static_cast<uint32_t>(index);
    report.tamper_mask = mask;
    return std::vector<Bytes>{std::move(tampered)};
  };
}

struct AssertionSink {
  std::vector<Assertion>& out;
  void check(std::string name, bool pass, std::string detail = "") {
    out.push_back({std::move(name), pass, std::move(detail)});
  }
};

std::string join_lines(const std::vector<std::string>& lines) {
  std::string text;
  for (const auto& line : lines) {
    text += line;
    text.push_back('\n');
  }
  return text;
}

Bytes wire_qname(const dns::Name& name) {
  ByteWriter w;
  for (const auto& label : name.labels()) {
    w.u8(static_cast<uint8_t>(label.size()));
    w.raw(label);
  }
  w.u8(0);
  return w.take();
}

void count_envelopes(const Sim& sim, ScenarioReport& report) {
  for (const auto& node : sim.node_ids()) {
    for (const auto& entry : sim.transcript(node).entries) {
      if (entry.direction != Direction::kSent) continue;
      std::string type = "UNDECODABLE";
      try {
        type = type_name(env::decode_envelope(entry.bytes).msg_type);
      } catch (const Error&) {
      }
      ++report.envelope_counts[node + "->" + entry.peer + ":" + type];
    }
  }
}

uint64_t count_of(const ScenarioReport& report, const std::string& key) {
  auto it = report.envelope_counts.find(key);
  return it == report.envelope_counts.end() ? 0 : it->second;
}

// The privacy assertions every script runs.
void privacy_assertions(const Sim& sim, const Scenario& scenario,
                        const resolver::ZoneStore& zone, AssertionSink& sink) {
  const Transcript& resolver_t = sim.transcript(std::string(kResolverNode));
  bool peers_ok = std::all_of(
      resolver_t.entries.begin(), resolver_t.entries.end(),
      [](const TranscriptEntry& e) { return e.peer == kProxyNode; });
  sink.check("resolver-peer-is-proxy-only", peers_ok);

  Bytes resolver_bytes = resolver_t.concatenated();
  sink.check("resolver-blind-to-client-id",
             !contains(resolver_bytes, to_bytes(kClientNode)));

  const Transcript& proxy_t = sim.transcript(std::string(kProxyNode));
  Bytes proxy_bytes = proxy_t.concatenated();
  dns::Name domain = dns::Name::parse(scenario.domain);
  sink.check("proxy-blind-to-qname",
             !contains(proxy_bytes, wire_qname(domain)));

  bool addr_leak = false;
  for (const auto& addr : lookup(zone, domain)) {
    if (contains(proxy_bytes, ByteView(addr))) addr_leak = true;
  }
  sink.check("proxy-blind-to-answer-address", !addr_leak);

  // Pass-through opacity: every payload the proxy sent appeared among the
  // payloads it received.
  std::vector<Bytes> received;
  for (const auto& entry : proxy_t.entries) {
    if (entry.direction != Direction::kReceived) continue;
    try {
      received.push_back(env::decode_envelope(entry.bytes).payload);
    } catch (const Error&) {
    }
  }
  bool opaque = true;
  for (const auto& entry : proxy_t.entries) {
    if (entry.direction != Direction::kSent) continue;
    env::Envelope e;
    try {
      e = env::decode_envelope(entry.bytes);
    } catch (const Error&) {
      opaque = false;
      continue;
    }
    if (std::find(received.begin(), received.end(), e.payload) == received.end()) {
      opaque = false;
    }
  }
  sink.check("proxy-pass-through-opaque", opaque);
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
  Scenario scenario;
  bool zone_replaced = false;
  size_t start = 0;
  while (start < text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    if (line.empty() || line.front() == '#') continue;
    size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw Malformed("expected key=value");
    std::string_view key = line.substr(0, eq);
    std::string_view value = line.substr(eq + 1);
    if (key == "script") {
      scenario.script = std::string(value);
    } else if (key == "seed") {
      scenario.seed = parse_u64(value, key);
    } else if (key == "domain") {
      scenario.domain = std::string(value);
    } else if (key == "zone") {
      if (!zone_replaced) {
        scenario.zone_lines.clear();
        zone_replaced = true;
      }
      scenario.zone_lines.emplace_back(value);
    } else if (key == "latency_cp_ms") {
      scenario.latency_cp_ms = parse_u64(value, key);
    } else if (key == "latency_pr_ms") {
      scenario.latency_pr_ms = parse_u64(value, key);
    } else if (key == "tamper_position") {
      scenario.tamper_position = static_cast<uint32_t>(parse_u64(value, key));
    } else {
      throw Malformed("unknown scenario key: " + std::string(key));
    }
  }
  if (!kScripts.contains(scenario.script)) {
    throw UnknownScenario("unknown script: " + scenario.script);
  }
  return scenario;
}

bool ScenarioReport::all_pass() const {
  return std::all_of(assertions.begin(), assertions.end(),
                     [](const Assertion& a) { return a.pass; });
}

std::string ScenarioReport::to_text() const {
  std::ostringstream out;
  out << "scenario=" << script << "\n";
  out << "seed=" << seed << "\n";
  out << "outcome=" << client_outcome << "\n";
  for (const auto& answer : answers) out << "answer=" << answer << "\n";
  out << "answer_time_ms=" << answer_time_ms << "\n";
  out << "client_retried=" << (client_retried ? 1 : 0) << "\n";
  out << "late_envelopes=" << late_envelopes << "\n";
  if (tamper_mask != 0) {
    out << "tamper_position=" << tamper_position << "\n";
    out << "tamper_mask=" << static_cast<unsigned>(tamper_mask) << "\n";
  }
  for (const auto& [key, value] : envelope_counts) {
    out << "messages=" << key << ":" << value << "\n";
  }
  for (const auto& [key, value] : establishments) {
    out << "establishments=" << key << ":" << value << "\n";
  }
  for (const auto& [key, value] : proxy_denials) {
    out << "proxy_denials=" << key << ":" << value << "\n";
  }
  out << "proxy_unknown_slots=" << proxy_unknown_slots << "\n";
  out << "resolver_answered=" << resolver_answered << "\n";
  out << "resolver_key_updates=" << resolver_key_updates << "\n";
  out << "resolver_replays=" << resolver_replays << "\n";
  out << "resolver_dropped=" << resolver_dropped << "\n";
  for (const auto& assertion : assertions) {
    out << "assert " << assertion.name << " "
        << (assertion.pass ? "PASS" : "FAIL");
    if (!assertion.detail.empty()) out << " " << assertion.detail;
    out << "\n";
  }
  out << "result=" << (all_pass() ? "PASS" : "FAIL") << "\n";
  return out.str();
}

ScenarioReport run_scenario(const Scenario& scenario) {
  if (!kScripts.contains(scenario.script)) {
    throw UnknownScenario("unknown script: " + scenario.script);
  }

  ScenarioReport report;
  report.script = scenario.script;
  report.seed = scenario.seed;

  SeededRandom rng(scenario.seed);
  resolver::ZoneStore zone = resolver::load_zone(join_lines(scenario.zone_lines));

  seal::ResolverKeyPair keypair = seal::generate_keypair({}, 1, rng);
  ResolverActor resolver_actor{std::move(keypair),
                               resolver::load_zone(join_lines(scenario.zone_lines))};
  seal::KeyConfig client_config = resolver_actor.core.config();
  if (scenario.script == "key_rotation") {
    // The client keeps the stale config it obtained before the rotation.
    resolver_actor.core.rotate_keys(rng);
  }

  std::string target_uri = scenario.script == "deny_unlisted_resolver"
                               ? "quic://evil-1:8853"
                               : std::string(kResolverUri);

  TopologySpec topo;
  topo.nodes = {{std::string(kClientNode), Role::kClient},
                {std::string(kProxyNode), Role::kProxy},
                {std::string(kResolverNode), Role::kResolver}};
  topo.links = {{std::string(kClientNode), std::string(kProxyNode),
                 scenario.latency_cp_ms},
                {std::string(kProxyNode), std::string(kResolverNode),
                 scenario.latency_pr_ms}};
  Sim sim(topo);

  ClientActor client_actor;
  client_actor.self = kClientNode;
  client_actor.proxy_node = kProxyNode;

  ProxyActor proxy_actor{proxy::Config{{std::string(kResolverUri)}}};
  proxy_actor.self = kProxyNode;
  resolver_actor.self = kResolverNode;

  sim.bind(std::string(kClientNode),
           [&](Sim& s, const std::string& from, const Bytes& bytes) {
             client_actor.handle(s, from, bytes);
           });
  sim.bind(std::string(kProxyNode),
           [&](Sim& s, const std::string& from, const Bytes& bytes) {
             proxy_actor.handle(s, from, bytes);
           });
  sim.bind(std::string(kResolverNode),
           [&](Sim& s, const std::string& from, const Bytes& bytes) {
             resolver_actor.handle(s, from, bytes);
           });

  // Script wiring that needs randomness draws in a fixed order: tamper
  // parameters first, then the session.
  if (scenario.script == "tamper_request" || scenario.script == "tamper_response") {
    uint32_t position = scenario.tamper_position
                            ? *scenario.tamper_position
                            : rng.u32();
    uint8_t mask = rng.u8();
    if (mask == 0) mask = 0x01;
    if (scenario.script == "tamper_request") {
      sim.set_interceptor(make_tamper(env::MsgType::kObliviousQuery,
                                      std::string(kProxyNode),
                                      std::string(kResolverNode), position, mask,
                                      report));
    } else {
      sim.set_interceptor(make_tamper(env::MsgType::kObliviousResponse,
                                      std::string(kResolverNode),
                                      std::string(kProxyNode), position, mask,
                                      report));
    }
  } else if (scenario.script == "replay_duplicate") {
    auto duplicated = std::make_shared<bool>(false);
    sim.set_interceptor(
        [duplicated](const std::string& from, const std::string& to,
                     const Bytes& bytes) -> std::optional<std::vector<Bytes>> {
          if (*duplicated || from != kProxyNode || to != kResolverNode) {
            return std::nullopt;
          }
          *duplicated = true;
          return std::vector<Bytes>{bytes, bytes};
        });
  } else if (scenario.script == "blackhole") {
    sim.set_interceptor(
        [](const std::string& from, const std::string&,
           const Bytes&) -> std::optional<std::vector<Bytes>> {
          if (from == kClientNode) return std::vector<Bytes>{};
          return std::nullopt;
        });
  }

  dns::Name domain = dns::Name::parse(scenario.domain);
  sim.after(0, [&](Sim& s) {
    auto [session, envelope] =
        client::Session::start(domain, target_uri, client_config, rng);
    client_actor.session = std::move(session);
    s.send(client_actor.self, client_actor.proxy_node,
           env::encode_envelope(envelope));
  });

  sim.run();

  report.client_outcome = client_actor.outcome;
  report.answers = client_actor.answers;
  report.answer_time_ms = client_actor.answer_time_ms;
  report.client_retried = client_actor.session && client_actor.session->retried();
  report.late_envelopes = client_actor.late_envelopes;
  report.proxy_denials = proxy_actor.denials;
  report.proxy_unknown_slots = proxy_actor.unknown_slots;
  auto stats = resolver_actor.core.stats();
  report.resolver_answered = stats.answered;
  report.resolver_key_updates = stats.key_updates;
  report.resolver_replays = stats.replays;
  report.resolver_dropped = resolver_actor.dropped;
  for (const auto& [key, value] : sim.all_establishments()) {
    report.establishments[key.first + "|" + key.second] = value;
  }
  count_envelopes(sim, report);
  for (const auto& node : sim.node_ids()) {
    report.transcripts[node] = sim.transcript(node);
  }

  AssertionSink sink{report.assertions};
  privacy_assertions(sim, scenario, zone, sink);

  const std::string c = std::string(kClientNode);
  const std::string p = std::string(kProxyNode);
  const std::string r = std::string(kResolverNode);
  uint64_t queries_cp = count_of(report, c + "->" + p + ":QUERY");
  uint64_t key_updates_rp = count_of(report, r + "->" + p + ":KEY_UPDATE");
  uint64_t key_updates_pc = count_of(report, p + "->" + c + ":KEY_UPDATE");
  uint64_t responses_rp = count_of(report, r + "->" + p + ":RESPONSE");

  if (scenario.script == "happy_path") {
    std::vector<std::string> expected;
    for (const auto& addr : lookup(zone, domain)) {
      expected.push_back(dns::format_ipv4(addr));
    }
    sink.check("answer", report.client_outcome == "answer", report.client_outcome);
    sink.check("answer-addresses", report.answers == expected);
    uint64_t expected_rtt = 2 * (scenario.latency_cp_ms + scenario.latency_pr_ms);
    sink.check("round-trip-time",
               report.answer_time_ms == expected_rtt,
               std::to_string(report.answer_time_ms) + " expected " +
                   std::to_string(expected_rtt));
    sink.check("one-establishment-per-hop",
               sim.establishments(c, p) == 1 && sim.establishments(p, r) == 1);
  } else if (scenario.script == "nxdomain") {
    sink.check("name-error", report.client_outcome == "name_error",
               report.client_outcome);
  } else if (scenario.script == "key_rotation") {
    sink.check("answer", report.client_outcome == "answer", report.client_outcome);
    sink.check("two-client-queries", queries_cp == 2, std::to_string(queries_cp));
    sink.check("one-key-update",
               key_updates_rp == 1 && key_updates_pc == 1,
               std::to_string(key_updates_rp) + "/" + std::to_string(key_updates_pc));
    sink.check("one-establishment-per-hop",
               sim.establishments(c, p) == 1 && sim.establishments(p, r) == 1,
               std::to_string(sim.establishments(c, p)) + "/" +
                   std::to_string(sim.establishments(p, r)));
    sink.check("client-retried", report.client_retried);
  } else if (scenario.script == "replay_duplicate") {
    sink.check("one-answer",
               report.client_outcome == "answer" && report.answers.size() >= 1 &&
                   count_of(report, p + "->" + c + ":RESPONSE") == 1);
    sink.check("two-resolver-responses", responses_rp == 2,
               std::to_string(responses_rp));
    sink.check("replay-detected", report.resolver_replays == 1,
               std::to_string(report.resolver_replays));
    sink.check("duplicate-dropped-at-proxy", report.proxy_unknown_slots == 1,
               std::to_string(report.proxy_unknown_slots));
  } else if (scenario.script == "tamper_request") {
    sink.check("no-answer", report.client_outcome != "answer",
               report.client_outcome);
    sink.check("resolver-never-answered", report.resolver_answered == 0,
               std::to_string(report.resolver_answered));
    sink.check("key-update-or-drop",
               report.resolver_key_updates + report.resolver_dropped > 0);
  } else if (scenario.script == "tamper_response") {
    sink.check("no-answer", report.client_outcome != "answer",
               report.client_outcome);
    sink.check("reject-or-silent",
               report.client_outcome.starts_with("reject:") ||
                   report.client_outcome == "none",
               report.client_outcome);
  } else if (scenario.script == "deny_unlisted_resolver") {
    sink.check("denied",
               report.proxy_denials.count("not-allowed") == 1 &&
                   report.proxy_denials.at("not-allowed") == 1);
    sink.check("nothing-reached-resolver",
               sim.transcript(r).entries.empty());
    sink.check("no-answer", report.client_outcome == "none",
               report.client_outcome);
  }

  if (expects_completion(scenario.script) && client_actor.outcome == "none") {
    throw DeadlockError("scenario " + scenario.script +
                        " drained the event queue without a client outcome");
  }
  return report;
}

std::string OverheadReport::to_text() const {
  std::ostringstream out;
  out << "oblivious_rtt_ms=" << oblivious_rtt_ms << "\n";
  out << "direct_rtt_ms=" << direct_rtt_ms << "\n";
  out << "overhead_ms=" << overhead_ms << "\n";
  out << "oblivious_deliveries=" << oblivious_deliveries << "\n";
  out << "direct_deliveries=" << direct_deliveries << "\n";
  return out.str();
}

OverheadReport compare_direct_vs_oblivious(uint64_t latency_cp_ms,
                                           uint64_t latency_pr_ms,
                                           uint64_t latency_cr_ms,
                                           uint64_t seed) {
  OverheadReport out;

  Scenario oblivious;
  oblivious.seed = seed;
  oblivious.latency_cp_ms = latency_cp_ms;
  oblivious.latency_pr_ms = latency_pr_ms;
  ScenarioReport report = run_scenario(oblivious);
  out.oblivious_rtt_ms = report.answer_time_ms;
  for (const auto& [key, value] : report.envelope_counts) {
    out.oblivious_deliveries += value;
  }

  // Direct run: client straight to resolver over one link.
  SeededRandom rng(seed);
  seal::ResolverKeyPair keypair = seal::generate_keypair({}, 1, rng);
  ResolverActor resolver_actor{std::move(keypair),
                               resolver::load_zone("example.com A 10.0.2.5\n")};
  resolver_actor.self = kResolverNode;
  seal::KeyConfig config = resolver_actor.core.config();

  TopologySpec topo;
  topo.nodes = {{std::string(kClientNode), Role::kClient},
                {std::string(kResolverNode), Role::kResolver}};
  topo.links = {{std::string(kClientNode), std::string(kResolverNode),
                 latency_cr_ms}};
  Sim sim(topo);

  ClientActor client_actor;
  client_actor.self = kClientNode;
  client_actor.proxy_node = kResolverNode;  // replies go straight back
  sim.bind(std::string(kClientNode),
           [&](Sim& s, const std::string& from, const Bytes& bytes) {
             client_actor.handle(s, from, bytes);
           });
  sim.bind(std::string(kResolverNode),
           [&](Sim& s, const std::string& from, const Bytes& bytes) {
             resolver_actor.handle(s, from, bytes);
           });

  dns::Name domain = dns::Name::parse("example.com");
  sim.after(0, [&](Sim& s) {
    auto [session, envelope] = client::Session::start(
        domain, std::string(kResolverUri), config, rng);
    client_actor.session = std::move(session);
    s.send(client_actor.self, std::string(kResolverNode),
           env::encode_envelope(envelope));
  });
  sim.run();

  out.direct_rtt_ms = client_actor.answer_time_ms;
  out.direct_deliveries = sim.deliveries();
  out.overhead_ms = static_cast<int64_t>(out.oblivious_rtt_ms) -
                    static_cast<int64_t>(out.direct_rtt_ms);
  return out;
}

}  // namespace odoq::sim
