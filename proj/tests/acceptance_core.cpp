// Acceptance suite for the in-process protocol stack. Each criterion prints
// exactly one PASS/FAIL line; the process exits nonzero if any fail. The
// loopback transport criterion lives in the companion binary built with the
// transport library.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "odoq/client.hpp"
#include "odoq/proxy.hpp"
#include "odoq/random.hpp"
#include "odoq/resolver.hpp"
#include "odoq/scenario.hpp"
#include "odoq/seal.hpp"

using namespace odoq;

namespace {

struct Criterion {
  std::string id;
  std::string name;
  bool pass = false;
  std::string detail;
};

std::vector<Criterion> g_results;

void run(const std::string& id, const std::string& name,
         const std::function<std::string()>& body) {
  Criterion c{id, name, false, ""};
  try {
    c.detail = body();  // empty detail means pass
    c.pass = c.detail.empty();
  } catch (const std::exception& e) {
    c.pass = false;
    c.detail = std::string("exception: ") + e.what();
  }
  g_results.push_back(std::move(c));
}

Bytes wire_qname(const std::string& domain) {
  Bytes out;
  size_t start = 0;
  while (start <= domain.size()) {
    size_t dot = domain.find('.', start);
    if (dot == std::string::npos) dot = domain.size();
    out.push_back(static_cast<uint8_t>(dot - start));
    for (size_t i = start; i < dot; ++i) {
      out.push_back(static_cast<uint8_t>(domain[i]));
    }
    if (dot == domain.size()) break;
    start = dot + 1;
  }
  out.push_back(0);
  return out;
}

std::string random_domain(RandomSource& rng, size_t min_length) {
  static constexpr char kAlphabet[] = "abcdefghijklmnopqrstuvwxyz0123456789";
  std::string out;
  while (out.size() < min_length) {
    if (!out.empty()) out.push_back('.');
    size_t len = 5 + rng.below(8);
    for (size_t i = 0; i < len; ++i) {
      out.push_back(kAlphabet[rng.below(sizeof(kAlphabet) - 1)]);
    }
  }
  return out + ".test";
}

std::string criterion_happy_path() {
  auto start = std::chrono::steady_clock::now();
  sim::Scenario scenario;  // zone example.com A 10.0.2.5
  sim::ScenarioReport report = sim::run_scenario(scenario);
  auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                     std::chrono::steady_clock::now() - start)
                     .count();
  if (report.client_outcome != "answer") return "outcome " + report.client_outcome;
  if (report.answers != std::vector<std::string>{"10.0.2.5"}) return "wrong answer";
  if (!report.all_pass()) return "scenario assertion failed:\n" + report.to_text();
  if (elapsed >= 1000) return "took " + std::to_string(elapsed) + " ms";
  return "";
}

std::string criterion_proxy_blindness() {
  SeededRandom rng(0xb11d);
  int violations = 0;
  for (int i = 0; i < 100; ++i) {
    std::string domain = random_domain(rng, 10);
    std::array<uint8_t, 4> addr{};
    rng.fill(addr);
    sim::Scenario scenario;
    scenario.seed = 10'000 + static_cast<uint64_t>(i);
    scenario.domain = domain;
    scenario.zone_lines = {domain + " A " + dns::format_ipv4(addr)};
    sim::ScenarioReport report = sim::run_scenario(scenario);
    if (report.client_outcome != "answer") return "resolution failed for " + domain;

    Bytes proxy_bytes = report.transcripts.at("proxy-1").concatenated();
    if (contains(proxy_bytes, wire_qname(domain))) ++violations;
    if (contains(proxy_bytes, ByteView(addr))) ++violations;
  }
  if (violations != 0) return std::to_string(violations) + " leaks";
  return "";
}

std::string criterion_resolver_identity_blindness() {
  const std::vector<std::string> scripts = {
      "happy_path",       "nxdomain",        "key_rotation",
      "replay_duplicate", "tamper_response", "tamper_request",
      "deny_unlisted_resolver"};
  int violations = 0;
  for (const auto& script : scripts) {
    sim::Scenario scenario;
    scenario.script = script;
    if (script == "nxdomain") scenario.domain = "unknown.test";
    sim::ScenarioReport report = sim::run_scenario(scenario);
    const sim::Transcript& t = report.transcripts.at("resolver-1");
    for (const auto& entry : t.entries) {
      if (entry.peer != "proxy-1") ++violations;
    }
    if (contains(t.concatenated(), to_bytes("client-1"))) ++violations;
    for (const auto& assertion : report.assertions) {
      if (assertion.name.starts_with("resolver-") && !assertion.pass) ++violations;
    }
  }
  if (violations != 0) return std::to_string(violations) + " violations";
  return "";
}

std::string criterion_tamper_rejection() {
  int false_answers = 0;
  int bad_outcomes = 0;
  for (int k = 0; k < 64; ++k) {
    sim::Scenario scenario;
    scenario.script = "tamper_request";
    scenario.seed = 1000 + static_cast<uint64_t>(k);
    sim::ScenarioReport report = sim::run_scenario(scenario);
    if (report.client_outcome == "answer") ++false_answers;
    // the tampered query must have drawn a KEY_UPDATE or been dropped
    if (report.resolver_answered != 0) ++bad_outcomes;
    if (report.resolver_key_updates + report.resolver_dropped == 0) ++bad_outcomes;
  }
  for (int k = 0; k < 64; ++k) {
    sim::Scenario scenario;
    scenario.script = "tamper_response";
    scenario.seed = 2000 + static_cast<uint64_t>(k);
    sim::ScenarioReport report = sim::run_scenario(scenario);
    if (report.client_outcome == "answer") ++false_answers;
    bool rejected_or_dropped = report.client_outcome.starts_with("reject:") ||
                               report.client_outcome == "none";
    if (!rejected_or_dropped) ++bad_outcomes;
  }
  if (false_answers != 0) return std::to_string(false_answers) + " false answers";
  if (bad_outcomes != 0) return std::to_string(bad_outcomes) + " bad outcomes";
  return "";
}

std::string criterion_nonce_binding() {
  // A response re-sealed with a wrong nonce field (but valid AEAD keying)
  // must be rejected by the client.
  SeededRandom rng(0xac5);
  seal::ResolverKeyPair kp = seal::generate_keypair({}, 1, rng);
  auto [session, envelope] = client::Session::start(
      dns::Name::parse("example.com"), "quic://resolver-1:8853", kp.config, rng);
  seal::OpenedRequest opened =
      seal::open_request(kp, seal::decode_sealed_request(envelope.payload));
  dns::Message query = dns::decode_message(opened.query_wire);
  dns::Message response = dns::make_a_response(query, {{10, 0, 2, 5}}, 300);
  Bytes response_wire = dns::encode_message(response);

  ByteWriter w;
  w.u8(16);
  auto wrong_nonce = opened.secrets.nonce;
  wrong_nonce[5] ^= 0x10;
  w.raw(ByteView(wrong_nonce));
  std::string domain = query.question.name.to_string();
  w.u8(static_cast<uint8_t>(domain.size()));
  w.raw(domain);
  w.u16(static_cast<uint16_t>(response_wire.size()));
  w.raw(response_wire);
  Bytes body = w.take();
  Bytes prk =
      hpke::hkdf_extract(ByteView(opened.secrets.nonce), opened.secrets.sym_key);
  Bytes aead_nonce = hpke::hkdf_expand(prk, to_bytes("odoq response"), 12);
  const uint8_t aad[1] = {0x02};
  Bytes ct = hpke::aead_seal(opened.secrets.sym_key, aead_nonce, aad, body);

  client::Outcome outcome = session.on_envelope(env::make_response(std::move(ct)));
  auto* reject = std::get_if<client::Reject>(&outcome);
  if (reject == nullptr) return "wrong-nonce response was not rejected";
  if (reject->reason != client::RejectReason::kNonceMismatch) {
    return std::string("wrong reason: ") + std::string(client::to_string(reject->reason));
  }

  // Replay scenario: exactly one answer reaches the client and the
  // duplicate gets a sealed SERVFAIL.
  sim::Scenario scenario;
  scenario.script = "replay_duplicate";
  sim::ScenarioReport report = sim::run_scenario(scenario);
  if (!report.all_pass()) return "replay scenario:\n" + report.to_text();
  if (report.client_outcome != "answer") return "replay outcome " + report.client_outcome;
  if (report.resolver_replays != 1) return "replay count wrong";

  // Core-level duplicate: the second reply must decrypt to SERVFAIL.
  SeededRandom rng2(0xac6);
  seal::ResolverKeyPair kp2 = seal::generate_keypair({}, 1, rng2);
  resolver::Core core{kp2, resolver::load_zone("example.com A 10.0.2.5\n")};
  auto [session2, envelope2] = client::Session::start(
      dns::Name::parse("example.com"), "quic://resolver-1:8853", core.config(),
      rng2);
  env::Envelope stripped = env::strip_target(envelope2);
  (void)core.handle_query(stripped);
  env::Envelope dup_reply = core.handle_query(stripped);
  seal::OpenedResponse dup_opened = seal::open_response(
      session2.secrets(), seal::SealedResponse{dup_reply.payload});
  dns::Message dup_response = dns::decode_message(dup_opened.response_wire);
  if (dup_response.rcode != dns::kRcodeServFail) return "duplicate reply not SERVFAIL";
  return "";
}

std::string criterion_key_rotation() {
  sim::Scenario scenario;
  scenario.script = "key_rotation";
  sim::ScenarioReport report = sim::run_scenario(scenario);
  if (report.client_outcome != "answer") return "outcome " + report.client_outcome;
  if (report.envelope_counts.at("client-1->proxy-1:QUERY") != 2) {
    return "client query count wrong";
  }
  if (report.envelope_counts.at("resolver-1->proxy-1:KEY_UPDATE") != 1 ||
      report.envelope_counts.at("proxy-1->client-1:KEY_UPDATE") != 1) {
    return "key update count wrong";
  }
  if (report.establishments.at("client-1|proxy-1") != 1 ||
      report.establishments.at("proxy-1|resolver-1") != 1) {
    return "connection establishment count wrong";
  }
  if (!report.all_pass()) return "scenario assertion failed:\n" + report.to_text();
  return "";
}

std::string criterion_latency_model() {
  sim::OverheadReport spot = sim::compare_direct_vs_oblivious(10, 10, 10);
  if (spot.oblivious_rtt_ms != 40 || spot.direct_rtt_ms != 20 ||
      spot.overhead_ms != 20) {
    return "spot check failed:\n" + spot.to_text();
  }
  SeededRandom rng(0x1a7);
  for (int i = 0; i < 50; ++i) {
    uint64_t cp = rng.below(500);
    uint64_t pr = rng.below(500);
    uint64_t cr = rng.below(500);
    sim::OverheadReport r =
        sim::compare_direct_vs_oblivious(cp, pr, cr, 300 + static_cast<uint64_t>(i));
    if (r.oblivious_rtt_ms != 2 * (cp + pr)) return "oblivious RTT formula broke";
    if (r.direct_rtt_ms != 2 * cr) return "direct RTT formula broke";
    if (r.oblivious_deliveries != 4 || r.direct_deliveries != 2) {
      return "delivery count oracle broke";
    }
  }
  return "";
}

std::string criterion_codecs() {
  SeededRandom rng(0xc0dec);

  // DNS: the hand-encoded 29-byte oracle, then 1000 roundtrips.
  const Bytes oracle = from_hex(
      "123401000001000000000000076578616d706c6503636f6d0000010001");
  dns::Message q = dns::make_query(dns::Name::parse("example.com"), dns::kTypeA,
                                   0x1234);
  if (dns::encode_message(q) != oracle) return "query oracle mismatch";
  if (!(dns::decode_message(oracle) == q)) return "query oracle decode mismatch";

  for (int i = 0; i < 1000; ++i) {
    dns::Message m;
    m.txid = rng.u16();
    m.is_response = rng.u8() & 1;
    std::string label(1 + rng.below(20), 'a');
    for (auto& ch : label) ch = static_cast<char>('a' + rng.below(26));
    m.question.name = dns::Name({label, "test"});
    m.question.qtype = dns::kTypeA;
    if (m.is_response) {
      m.rcode = static_cast<uint8_t>(rng.below(16));
      size_t n = rng.below(3);
      for (size_t a = 0; a < n; ++a) {
        dns::ResourceRecord rr;
        rr.name = m.question.name;
        rr.ttl = rng.u32();
        rr.rdata.resize(4);
        rng.fill(rr.rdata);
        m.answers.push_back(rr);
      }
    }
    if (dns::decode_message(dns::encode_message(m)) != m) {
      return "dns roundtrip failed at case " + std::to_string(i);
    }
  }

  // Envelope roundtrips.
  for (int i = 0; i < 1000; ++i) {
    env::Envelope e;
    uint64_t pick = rng.below(3);
    e.msg_type = pick == 0   ? env::MsgType::kObliviousQuery
                 : pick == 1 ? env::MsgType::kObliviousResponse
                             : env::MsgType::kKeyUpdate;
    if (pick == 0) e.target_uri = "quic://h" + std::to_string(rng.u16()) + ":1";
    e.payload.resize(rng.below(600));
    rng.fill(e.payload);
    if (env::decode_envelope(env::encode_envelope(e)) != e) {
      return "envelope roundtrip failed at case " + std::to_string(i);
    }
  }

  // KeyConfig roundtrips.
  for (int i = 0; i < 1000; ++i) {
    seal::KeyConfig c;
    c.key_id = rng.u8();
    c.public_key.resize(32);
    rng.fill(c.public_key);
    if (seal::decode_key_config(seal::encode_key_config(c)) != c) {
      return "key config roundtrip failed at case " + std::to_string(i);
    }
  }

  // Seal/open roundtrips, request and response.
  seal::ResolverKeyPair kp = seal::generate_keypair({}, 5, rng);
  for (int i = 0; i < 1000; ++i) {
    seal::SessionSecrets secrets = seal::SessionSecrets::generate(rng);
    Bytes body(1 + rng.below(200));
    rng.fill(body);
    seal::SealedRequest sealed = seal::seal_request(kp.config, body, secrets, rng);
    seal::SealedRequest decoded =
        seal::decode_sealed_request(seal::encode_sealed_request(sealed));
    if (decoded != sealed) return "sealed request codec failed";
    seal::OpenedRequest opened = seal::open_request(kp, decoded);
    if (opened.query_wire != body || !(opened.secrets == secrets)) {
      return "request seal/open roundtrip failed at case " + std::to_string(i);
    }
    seal::SealedResponse response =
        seal::seal_response(secrets, body, dns::Name::parse("roundtrip.test"));
    seal::OpenedResponse opened_response = seal::open_response(secrets, response);
    if (opened_response.response_wire != body ||
        opened_response.nonce != secrets.nonce ||
        opened_response.domain != "roundtrip.test") {
      return "response seal/open roundtrip failed at case " + std::to_string(i);
    }
  }
  return "";
}

}  // namespace

int main() {
  run("C1", "end-to-end-happy-path", criterion_happy_path);
  run("C2", "proxy-blindness", criterion_proxy_blindness);
  run("C3", "resolver-identity-blindness", criterion_resolver_identity_blindness);
  run("C4", "tamper-rejection", criterion_tamper_rejection);
  run("C5", "nonce-binding", criterion_nonce_binding);
  run("C6", "key-rotation-recovery", criterion_key_rotation);
  run("C7", "latency-model-exactness", criterion_latency_model);
  run("C8", "codec-properties", criterion_codecs);

  bool all = true;
  for (const auto& c : g_results) {
    std::printf("%s %-28s %s%s%s\n", c.id.c_str(), c.name.c_str(),
                c.pass ? "PASS" : "FAIL", c.detail.empty() ? "" : " ",
                c.detail.c_str());
    all = all && c.pass;
  }
  return all ? 0 : 1;
}
