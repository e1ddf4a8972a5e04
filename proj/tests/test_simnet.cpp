#include "odoq/scenario.hpp"
#include "odoq/simnet.hpp"

#include <doctest.h>

#include "odoq/random.hpp"

using namespace odoq;
using namespace odoq::sim;

TEST_CASE("topology validation") {
  TopologySpec spec;
  spec.nodes = {{"a", Role::kClient}, {"b", Role::kProxy}};
  spec.links = {{"a", "b", 5}};
  CHECK_NOTHROW(Sim{spec});

  SUBCASE("duplicate node") {
    spec.nodes.push_back({"a", Role::kResolver});
    CHECK_THROWS_AS(Sim{spec}, DuplicateNode);
  }
  SUBCASE("link to unknown node") {
    spec.links.push_back({"a", "zzz", 1});
    CHECK_THROWS_AS(Sim{spec}, UnknownEndpoint);
  }
  SUBCASE("empty spec runs as a no-op") {
    Sim sim{TopologySpec{}};
    sim.run();
    CHECK(sim.now() == 0);
    CHECK(sim.deliveries() == 0);
  }
}

TEST_CASE("latency and transcript bookkeeping") {
  TopologySpec spec;
  spec.nodes = {{"a", Role::kClient}, {"b", Role::kResolver}};
  spec.links = {{"a", "b", 7}};
  Sim sim{spec};

  Bytes seen;
  uint64_t seen_at = 0;
  sim.bind("b", [&](Sim& s, const std::string& from, const Bytes& bytes) {
    seen = bytes;
    seen_at = s.now();
    s.send("b", from, Bytes{9});
  });
  sim.after(0, [](Sim& s) { s.send("a", "b", Bytes{1, 2, 3}); });
  sim.run();

  CHECK(seen == Bytes{1, 2, 3});
  CHECK(seen_at == 7);
  CHECK(sim.now() == 14);
  CHECK(sim.deliveries() == 2);
  CHECK(sim.delivered_latency_sum() == 14);
  CHECK(sim.establishments("a", "b") == 1);
  CHECK(sim.message_count("a", "b") == 1);
  CHECK(sim.message_count("b", "a") == 1);

  const Transcript& ta = sim.transcript("a");
  REQUIRE(ta.entries.size() == 2);
  CHECK(ta.entries[0].direction == Direction::kSent);
  CHECK(ta.entries[0].peer == "b");
  CHECK(ta.entries[1].direction == Direction::kReceived);
  CHECK(ta.entries[1].time_ms == 14);
}

TEST_CASE("happy path resolves at exactly 2*(cp+pr)") {
  Scenario scenario;
  ScenarioReport report = run_scenario(scenario);
  CHECK(report.all_pass());
  CHECK(report.client_outcome == "answer");
  CHECK(report.answers == std::vector<std::string>{"10.0.2.5"});
  CHECK(report.answer_time_ms == 40);
  CHECK(report.to_text().find("result=PASS") != std::string::npos);
}

TEST_CASE("nxdomain scenario") {
  Scenario scenario;
  scenario.script = "nxdomain";
  scenario.domain = "unknown.test";
  ScenarioReport report = run_scenario(scenario);
  CHECK(report.all_pass());
  CHECK(report.client_outcome == "name_error");
}

TEST_CASE("key rotation recovers on the same connections") {
  Scenario scenario;
  scenario.script = "key_rotation";
  ScenarioReport report = run_scenario(scenario);
  CHECK(report.all_pass());
  CHECK(report.client_outcome == "answer");
  CHECK(report.client_retried);
  CHECK(report.envelope_counts.at("client-1->proxy-1:QUERY") == 2);
  CHECK(report.envelope_counts.at("resolver-1->proxy-1:KEY_UPDATE") == 1);
  CHECK(report.establishments.at("client-1|proxy-1") == 1);
  CHECK(report.establishments.at("proxy-1|resolver-1") == 1);
}

TEST_CASE("replay duplicate yields one answer and one sealed SERVFAIL") {
  Scenario scenario;
  scenario.script = "replay_duplicate";
  ScenarioReport report = run_scenario(scenario);
  CHECK(report.all_pass());
  CHECK(report.resolver_replays == 1);
  CHECK(report.proxy_unknown_slots == 1);
  CHECK(report.envelope_counts.at("resolver-1->proxy-1:RESPONSE") == 2);
  CHECK(report.envelope_counts.at("proxy-1->client-1:RESPONSE") == 1);
}

TEST_CASE("tamper scenarios never answer") {
  for (uint64_t seed = 1; seed <= 8; ++seed) {
    Scenario scenario;
    scenario.seed = seed;
    scenario.script = "tamper_request";
    ScenarioReport request_report = run_scenario(scenario);
    CHECK(request_report.all_pass());
    CHECK(request_report.client_outcome != "answer");

    scenario.script = "tamper_response";
    ScenarioReport response_report = run_scenario(scenario);
    CHECK(response_report.all_pass());
    CHECK(response_report.client_outcome != "answer");
  }
}

TEST_CASE("unlisted resolver is denied before any forwarding") {
  Scenario scenario;
  scenario.script = "deny_unlisted_resolver";
  ScenarioReport report = run_scenario(scenario);
  CHECK(report.all_pass());
  CHECK(report.proxy_denials.at("not-allowed") == 1);
  CHECK(report.transcripts.at("resolver-1").entries.empty());
}

TEST_CASE("identical scenario and seed reproduce identical transcripts") {
  for (const char* script : {"happy_path", "key_rotation", "tamper_response"}) {
    Scenario scenario;
    scenario.script = script;
    scenario.seed = 77;
    ScenarioReport a = run_scenario(scenario);
    ScenarioReport b = run_scenario(scenario);
    REQUIRE(a.transcripts.size() == b.transcripts.size());
    for (const auto& [node, transcript] : a.transcripts) {
      const Transcript& other = b.transcripts.at(node);
      REQUIRE(transcript.entries.size() == other.entries.size());
      for (size_t i = 0; i < transcript.entries.size(); ++i) {
        CHECK(transcript.entries[i].time_ms == other.entries[i].time_ms);
        CHECK(transcript.entries[i].peer == other.entries[i].peer);
        CHECK(transcript.entries[i].bytes == other.entries[i].bytes);
      }
    }
    CHECK(a.to_text() == b.to_text());
  }
}

TEST_CASE("blackhole script deadlocks by design") {
  Scenario scenario;
  scenario.script = "happy_path";
  CHECK_NOTHROW(run_scenario(scenario));
  scenario.script = "blackhole";
  // blackhole is excluded from the completion requirement, so it reports
  // outcome none instead of throwing
  ScenarioReport report = run_scenario(scenario);
  CHECK(report.client_outcome == "none");
}

TEST_CASE("unknown script") {
  Scenario scenario;
  scenario.script = "not-a-script";
  CHECK_THROWS_AS(run_scenario(scenario), UnknownScenario);
}

TEST_CASE("scenario spec text parsing") {
  Scenario s = parse_scenario(
      "script=key_rotation\n"
      "seed=99\n"
      "domain=private.example\n"
      "zone=private.example A 192.0.2.7\n"
      "zone=other.example A 192.0.2.8 60\n"
      "latency_cp_ms=3\n"
      "latency_pr_ms=4\n");
  CHECK(s.script == "key_rotation");
  CHECK(s.seed == 99);
  CHECK(s.domain == "private.example");
  CHECK(s.zone_lines.size() == 2);
  CHECK(s.latency_cp_ms == 3);
  CHECK(s.latency_pr_ms == 4);

  ScenarioReport report = run_scenario(s);
  CHECK(report.all_pass());
  CHECK(report.answers == std::vector<std::string>{"192.0.2.7"});

  CHECK_THROWS_AS(parse_scenario("script=nope\n"), UnknownScenario);
  CHECK_THROWS_AS(parse_scenario("bogus\n"), Malformed);
  CHECK_THROWS_AS(parse_scenario("seed=abc\n"), Malformed);
}

TEST_CASE("direct vs oblivious overhead arithmetic") {
  OverheadReport r = compare_direct_vs_oblivious(10, 10, 10);
  CHECK(r.oblivious_rtt_ms == 40);
  CHECK(r.direct_rtt_ms == 20);
  CHECK(r.overhead_ms == 20);
  CHECK(r.oblivious_deliveries == 4);
  CHECK(r.direct_deliveries == 2);

  // zero proxy-resolver latency collapses to the formula
  OverheadReport z = compare_direct_vs_oblivious(6, 0, 9);
  CHECK(z.oblivious_rtt_ms == 12);
  CHECK(z.direct_rtt_ms == 18);
  CHECK(z.overhead_ms == -6);

  SeededRandom rng(61);
  for (int i = 0; i < 20; ++i) {
    uint64_t cp = rng.below(200);
    uint64_t pr = rng.below(200);
    uint64_t cr = rng.below(200);
    OverheadReport random_report = compare_direct_vs_oblivious(cp, pr, cr, 5 + i);
    CHECK(random_report.oblivious_rtt_ms == 2 * (cp + pr));
    CHECK(random_report.direct_rtt_ms == 2 * cr);
    CHECK(random_report.overhead_ms ==
          static_cast<int64_t>(2 * (cp + pr)) - static_cast<int64_t>(2 * cr));
  }
}
