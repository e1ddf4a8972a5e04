#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "odoq/simnet.hpp"

// Scripted protocol runs over the simulator, with built-in assertions per
// script. Reports serialize as line-oriented key/value text with one
// machine-readable PASS/FAIL line per assertion.

namespace odoq::sim {

// The event queue drained before a script that requires completion reached
// a terminal client outcome.
class DeadlockError : public Error {
 public:
  using Error::Error;
};

class UnknownScenario : public Error {
 public:
  using Error::Error;
};

// Script names: happy_path, nxdomain, key_rotation, replay_duplicate,
// tamper_response, tamper_request, deny_unlisted_resolver, blackhole.
struct Scenario {
  std::string script = "happy_path";
  uint64_t seed = 1;
  std::string domain = "example.com";
  std::vector<std::string> zone_lines = {"example.com A 10.0.2.5"};
  uint64_t latency_cp_ms = 10;
  uint64_t latency_pr_ms = 10;
  // Byte offset into the tampered payload; drawn from the seed when unset.
  std::optional<uint32_t> tamper_position;
};

Scenario parse_scenario(std::string_view text);

struct Assertion {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ScenarioReport {
  std::string script;
  uint64_t seed = 0;
  std::string client_outcome;  // answer | name_error | reject:<reason> | none
  std::vector<std::string> answers;
  uint64_t answer_time_ms = 0;
  bool client_retried = false;
  uint64_t late_envelopes = 0;

  uint32_t tamper_position = 0;
  uint8_t tamper_mask = 0;

  // "from->to:TYPE" -> count, decoded from sent transcript entries.
  std::map<std::string, uint64_t> envelope_counts;
  std::map<std::string, uint64_t> establishments;  // "a|b" -> count
  std::map<std::string, uint64_t> proxy_denials;
  uint64_t proxy_unknown_slots = 0;
  uint64_t resolver_answered = 0;
  uint64_t resolver_key_updates = 0;
  uint64_t resolver_replays = 0;
  uint64_t resolver_dropped = 0;

  std::map<std::string, Transcript> transcripts;
  std::vector<Assertion> assertions;

  bool all_pass() const;
  std::string to_text() const;
};

ScenarioReport run_scenario(const Scenario& scenario);

inline constexpr std::string_view kClientNode = "client-1";
inline constexpr std::string_view kProxyNode = "proxy-1";
inline constexpr std::string_view kResolverNode = "resolver-1";
inline constexpr std::string_view kResolverUri = "quic://resolver-1:8853";

struct OverheadReport {
  uint64_t oblivious_rtt_ms = 0;
  uint64_t direct_rtt_ms = 0;
  int64_t overhead_ms = 0;
  uint64_t oblivious_deliveries = 0;
  uint64_t direct_deliveries = 0;
  std::string to_text() const;
};

// Same resolution once through the proxy and once straight to the resolver,
// reporting the structural round-trip cost of the extra hop.
OverheadReport compare_direct_vs_oblivious(uint64_t latency_cp_ms,
                                           uint64_t latency_pr_ms,
                                           uint64_t latency_cr_ms,
                                           uint64_t seed = 1);

}  // namespace odoq::sim
