// End-to-end runs of the operator binaries on loopback: exit codes, output
// format, rotation recovery, and denial behavior.

#include <doctest.h>

#include <thread>

#include "cli_fixture.hpp"

using namespace odoq::test;

namespace {

const char kZone[] = "example.com A 10.0.2.5\n";

}  // namespace

TEST_CASE("help exits zero and documents the flags") {
  StackPaths paths = StackPaths::from_env();
  struct Case {
    std::string bin;
    std::vector<std::string> flags;
  };
  for (const auto& c : std::initializer_list<Case>{
           {paths.resolver, {"--listen", "--key-file", "--zone"}},
           {paths.proxy, {"--listen", "--allow"}},
           {paths.client, {"--proxy", "--resolver", "--key"}}}) {
    Subprocess proc = Subprocess::spawn({c.bin, "--help"});
    std::string text = proc.drain_stdout(2000);
    auto code = proc.wait_exit(2000);
    CHECK(code == 0);
    for (const auto& flag : c.flags) {
      CHECK_MESSAGE(text.find(flag) != std::string::npos,
                    c.bin << " help lacks " << flag);
    }
  }
}

TEST_CASE("startup failures exit 1") {
  StackPaths paths = StackPaths::from_env();
  TempDir dir;

  SUBCASE("resolver without a zone file") {
    Subprocess proc = Subprocess::spawn(
        {paths.resolver, "--key-file", dir.path("k"), "--zone",
         dir.path("missing.zone")});
    CHECK(proc.wait_exit(3000) == 1);
  }
  SUBCASE("resolver with an unparsable zone") {
    std::string zone = dir.file("bad.zone", "foo A 999.1.1.1\n");
    Subprocess proc = Subprocess::spawn(
        {paths.resolver, "--key-file", dir.path("k"), "--zone", zone});
    CHECK(proc.wait_exit(3000) == 1);
  }
  SUBCASE("proxy without --allow") {
    Subprocess proc = Subprocess::spawn({paths.proxy});
    CHECK(proc.wait_exit(3000) == 1);
  }
}

TEST_CASE("full loopback resolution") {
  StackPaths paths = StackPaths::from_env();
  TempDir dir;
  std::string zone = dir.file("zone", kZone);
  ServerHandle resolver = launch_resolver(paths, dir.path("key"), zone);
  ServerHandle proxy = launch_proxy(paths, resolver.uri(), resolver.fingerprint);

  SUBCASE("answer prints exactly one line and exits 0") {
    ClientResult r = run_client(paths, proxy.hostport(), resolver.uri(),
                                resolver.key_b64, "example.com",
                                {"--pin-proxy", proxy.fingerprint});
    CHECK(r.exit_code == 0);
    CHECK(r.stdout_text == "example.com 10.0.2.5\n");
  }

  SUBCASE("unknown name exits 2 with empty stdout") {
    ClientResult r = run_client(paths, proxy.hostport(), resolver.uri(),
                                resolver.key_b64, "unknown.test");
    CHECK(r.exit_code == 2);
    CHECK(r.stdout_text.empty());
  }

  SUBCASE("unlisted resolver target is denied, client exits 4") {
    ClientResult r = run_client(paths, proxy.hostport(),
                                "quic://127.0.0.1:1", resolver.key_b64,
                                "example.com");
    CHECK(r.exit_code == 4);
    CHECK(r.stdout_text.empty());
  }

  SUBCASE("wrong proxy pin exits 4") {
    ClientResult r = run_client(paths, proxy.hostport(), resolver.uri(),
                                resolver.key_b64, "example.com",
                                {"--pin-proxy", std::string(64, '0')});
    CHECK(r.exit_code == 4);
  }

  SUBCASE("rotation recovery on the same connection exits 0") {
    resolver.proc.write_line("rotate");
    auto new_key = resolver.proc.read_line(false, 5000);
    REQUIRE(new_key.has_value());
    CHECK(*new_key != resolver.key_b64);

    // stale key: first query draws KEY_UPDATE, retry succeeds
    ClientResult r = run_client(paths, proxy.hostport(), resolver.uri(),
                                resolver.key_b64, "example.com");
    CHECK(r.exit_code == 0);
    CHECK(r.stdout_text == "example.com 10.0.2.5\n");
  }

  SUBCASE("rotation during the retry window exits 3") {
    resolver.proc.write_line("rotate");
    REQUIRE(resolver.proc.read_line(false, 5000).has_value());

    Subprocess client;
    (void)run_client(paths, proxy.hostport(), resolver.uri(), resolver.key_b64,
                     "example.com", {"--retry-delay-ms", "1500"}, 0, &client);
    // first KEY_UPDATE lands quickly; rotate again before the delayed retry
    std::this_thread::sleep_for(std::chrono::milliseconds(600));
    resolver.proc.write_line("rotate");
    REQUIRE(resolver.proc.read_line(false, 5000).has_value());

    auto code = client.wait_exit(15000);
    CHECK(code == 3);
  }
}

TEST_CASE("key file survives restarts") {
  StackPaths paths = StackPaths::from_env();
  TempDir dir;
  std::string zone = dir.file("zone", kZone);
  std::string key_b64;
  {
    ServerHandle resolver = launch_resolver(paths, dir.path("key"), zone);
    key_b64 = resolver.key_b64;
  }
  ServerHandle resolver = launch_resolver(paths, dir.path("key"), zone);
  CHECK(resolver.key_b64 == key_b64);
}
