#include "odoq/resolver.hpp"

#include <doctest.h>

#include "odoq/client.hpp"
#include "odoq/random.hpp"

using namespace odoq;
using namespace odoq::resolver;

namespace {

const char kZoneText[] =
    "# fixture zone\n"
    "example.com A 10.0.2.5\n"
    "\n"
    "multi.test A 192.0.2.1 120\n"
    "multi.test A 192.0.2.2 120\n";

struct Fixture {
  SeededRandom rng{51};
  seal::ResolverKeyPair keypair = seal::generate_keypair({}, 1, rng);
  Core core{keypair, load_zone(kZoneText)};

  // Builds a stripped query envelope the way the proxy would deliver it.
  std::pair<client::Session, env::Envelope> query(const std::string& domain) {
    auto [session, envelope] = client::Session::start(
        dns::Name::parse(domain), "quic://resolver-1:8853", core.config(), rng);
    return {std::move(session), env::strip_target(envelope)};
  }
};

}  // namespace

TEST_CASE("zone parsing") {
  ZoneStore zone = load_zone(kZoneText);
  CHECK(zone.size() == 2);
  CHECK(lookup(zone, dns::Name::parse("example.com")) ==
        std::vector<std::array<uint8_t, 4>>{{10, 0, 2, 5}});
  CHECK(lookup(zone, dns::Name::parse("EXAMPLE.COM")) ==
        std::vector<std::array<uint8_t, 4>>{{10, 0, 2, 5}});
  CHECK(lookup(zone, dns::Name::parse("unknown.test")).empty());
  // duplicate lines merged
  CHECK(lookup(zone, dns::Name::parse("multi.test")).size() == 2);

  CHECK_THROWS_AS(load_zone("foo A 999.1.1.1\n"), ParseError);
  CHECK_THROWS_AS(load_zone("foo AAAA ::1\n"), ParseError);
  CHECK_THROWS_AS(load_zone("foo\n"), ParseError);
  CHECK_THROWS_AS(load_zone("foo A 1.2.3.4 12x\n"), ParseError);
  CHECK_THROWS_AS(load_zone("foo A 1.2.3.4 1 extra\n"), ParseError);
  try {
    load_zone("ok.test A 1.2.3.4\nbad line here\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("nonce cache evicts FIFO at capacity") {
  NonceCache cache(3);
  std::array<uint8_t, 16> n{};
  for (uint8_t i = 0; i < 4; ++i) {
    n[0] = i;
    CHECK_FALSE(cache.check_and_insert(n));
  }
  CHECK(cache.size() == 3);
  n[0] = 0;  // evicted, so it reads as fresh again
  CHECK_FALSE(cache.check_and_insert(n));
  n[0] = 3;
  CHECK(cache.check_and_insert(n));
}

TEST_CASE("valid query gets a sealed answer") {
  Fixture f;
  auto [session, envelope] = f.query("example.com");
  env::Envelope reply = f.core.handle_query(envelope);
  CHECK(reply.msg_type == env::MsgType::kObliviousResponse);
  CHECK(reply.target_uri.empty());

  client::Outcome outcome = session.on_envelope(reply);
  auto* answer = std::get_if<client::Answer>(&outcome);
  REQUIRE(answer != nullptr);
  CHECK(answer->addresses ==
        std::vector<std::array<uint8_t, 4>>{{10, 0, 2, 5}});
  CHECK(f.core.stats().answered == 1);
}

TEST_CASE("unknown name yields sealed NXDOMAIN") {
  Fixture f;
  auto [session, envelope] = f.query("unknown.test");
  env::Envelope reply = f.core.handle_query(envelope);
  client::Outcome outcome = session.on_envelope(reply);
  CHECK(std::get_if<client::NameError>(&outcome) != nullptr);
}

TEST_CASE("non-A qtype yields sealed NOTIMP") {
  Fixture f;
  // hand-build a TXT query sealed the regular way
  seal::SessionSecrets secrets = seal::SessionSecrets::generate(f.rng);
  dns::Message q = dns::make_query(dns::Name::parse("example.com"), 16, 0x4242);
  seal::SealedRequest sealed = seal::seal_request(
      f.core.config(), dns::encode_message(q), secrets, f.rng);
  env::Envelope envelope =
      env::Envelope{env::kVersion, env::MsgType::kObliviousQuery, {},
                    seal::encode_sealed_request(sealed)};

  env::Envelope reply = f.core.handle_query(envelope);
  seal::OpenedResponse opened =
      seal::open_response(secrets, seal::SealedResponse{reply.payload});
  dns::Message response = dns::decode_message(opened.response_wire);
  CHECK(response.rcode == dns::kRcodeNotImp);
  CHECK(response.answers.empty());
  CHECK(response.txid == 0x4242);
}

TEST_CASE("rotation serves KEY_UPDATE for stale-key queries") {
  Fixture f;
  auto [session, envelope] = f.query("example.com");

  uint8_t old_id = f.core.config().key_id;
  Bytes old_pk = f.core.config().public_key;
  f.core.rotate_keys(f.rng);
  CHECK(f.core.config().key_id == static_cast<uint8_t>(old_id + 1));
  CHECK(f.core.config().public_key != old_pk);
  CHECK(f.core.previous_config()->key_id == old_id);

  env::Envelope reply = f.core.handle_query(envelope);
  CHECK(reply.msg_type == env::MsgType::kKeyUpdate);
  seal::KeyConfig carried = seal::decode_key_config(reply.payload);
  CHECK(carried == f.core.config());
  CHECK(f.core.stats().key_updates == 1);

  // the client retry under the carried key then succeeds
  client::Outcome retry_outcome = session.on_envelope(reply);
  auto* retry = std::get_if<client::Retry>(&retry_outcome);
  REQUIRE(retry != nullptr);
  env::Envelope second_reply =
      f.core.handle_query(env::strip_target(retry->envelope));
  CHECK(second_reply.msg_type == env::MsgType::kObliviousResponse);
  client::Outcome final_outcome = session.on_envelope(second_reply);
  CHECK(std::get_if<client::Answer>(&final_outcome) != nullptr);
}

TEST_CASE("two rotations produce distinct keys and ids") {
  Fixture f;
  Bytes pk0 = f.core.config().public_key;
  f.core.rotate_keys(f.rng);
  Bytes pk1 = f.core.config().public_key;
  f.core.rotate_keys(f.rng);
  Bytes pk2 = f.core.config().public_key;
  CHECK(pk0 != pk1);
  CHECK(pk1 != pk2);
  CHECK(f.core.config().key_id == 3);
}

TEST_CASE("key id wraps mod 256") {
  SeededRandom rng(52);
  seal::ResolverKeyPair kp = seal::generate_keypair({}, 255, rng);
  Core core{kp, load_zone("a.test A 1.2.3.4\n")};
  core.rotate_keys(rng);
  CHECK(core.config().key_id == 0);
}

TEST_CASE("duplicate nonce gets sealed SERVFAIL") {
  Fixture f;
  auto [session, envelope] = f.query("example.com");

  env::Envelope first = f.core.handle_query(envelope);
  CHECK(first.msg_type == env::MsgType::kObliviousResponse);

  env::Envelope second = f.core.handle_query(envelope);
  CHECK(second.msg_type == env::MsgType::kObliviousResponse);
  CHECK(f.core.stats().replays == 1);

  seal::OpenedResponse opened = seal::open_response(
      session.secrets(), seal::SealedResponse{second.payload});
  dns::Message response = dns::decode_message(opened.response_wire);
  CHECK(response.rcode == dns::kRcodeServFail);
  CHECK(response.answers.empty());
}

TEST_CASE("malformed inputs are connection-level errors") {
  Fixture f;
  CHECK_THROWS_AS(f.core.handle_query(env::make_response(Bytes{1})),
                  MalformedEnvelope);
  env::Envelope garbage{env::kVersion, env::MsgType::kObliviousQuery, {},
                        Bytes{1, 2, 3}};
  CHECK_THROWS_AS(f.core.handle_query(garbage), MalformedEnvelope);
}

TEST_CASE("reply payload shares no 4-byte window with the secrets") {
  Fixture f;
  for (int i = 0; i < 40; ++i) {
    auto [session, envelope] = f.query("example.com");
    env::Envelope reply = f.core.handle_query(envelope);

    const auto& secrets = session.secrets();
    Bytes query_wire = dns::encode_message(session.query());
    bool leaked = false;
    auto scan = [&](ByteView secret) {
      for (size_t off = 0; off + 4 <= secret.size(); ++off) {
        if (contains(reply.payload, secret.subspan(off, 4))) leaked = true;
      }
    };
    scan(secrets.sym_key);
    scan(ByteView(secrets.nonce));
    scan(query_wire);
    CHECK_FALSE(leaked);
  }
}

TEST_CASE("sealed response domain equals the question name") {
  Fixture f;
  auto [session, envelope] = f.query("MiXeD.ExAmPle.CoM");
  // zone has no such name; the sealed domain must still echo the question
  env::Envelope reply = f.core.handle_query(envelope);
  seal::OpenedResponse opened = seal::open_response(
      session.secrets(), seal::SealedResponse{reply.payload});
  CHECK(opened.domain == "MiXeD.ExAmPle.CoM");
}
