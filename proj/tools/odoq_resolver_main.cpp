// odoq-resolver: serves sealed DNS queries from a local zone file.
//
// Prints the base64 key configuration on standard output at startup (the
// pre-shared key distribution channel) and again after each rotation.
// Accepts the line `rotate` on standard input to rotate the key pair.

#include <CLI11.hpp>
#include <csignal>
#include <iostream>
#include <thread>
#include <vector>

#include "cli_util.hpp"
#include "odoq/resolver.hpp"
#include "odoq/transport.hpp"

namespace {

std::atomic<bool> g_stop{false};

void handle_signal(int) { g_stop = true; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ODoQ resolver: answers HPKE-sealed DNS queries from a zone file"};
  std::string listen = "127.0.0.1:8853";
  std::string key_file;
  std::string zone_file;
  app.add_option("--listen", listen, "host:port to listen on (port 0 picks a free port)");
  app.add_option("--key-file", key_file, "key pair file, created when absent")->required();
  app.add_option("--zone", zone_file, "zone file with A records")->required();
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  using namespace odoq;

  SystemRandom rng;
  std::unique_ptr<net::Listener> listener;
  std::unique_ptr<resolver::Core> core;
  try {
    resolver::ZoneStore zone = resolver::load_zone(cli::read_text_file(zone_file));
    seal::ResolverKeyPair keypair = cli::load_or_create_keypair(key_file, rng);
    core = std::make_unique<resolver::Core>(std::move(keypair), std::move(zone));

    net::EndpointAddr addr = net::EndpointAddr::parse_hostport(listen);
    net::ServerIdentity identity = net::ServerIdentity::generate("odoq-resolver");
    listener = net::Listener::bind(addr.host, addr.port, identity);
    cli::log_line("listening=" + addr.host + ":" + std::to_string(listener->port()));
    cli::log_line("tls-fingerprint=" + identity.fingerprint());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "odoq-resolver: %s\n", e.what());
    return 1;
  }

  std::printf("%s\n", base64_encode(seal::encode_key_config(core->config())).c_str());
  std::fflush(stdout);

  struct sigaction sa{};
  sa.sa_handler = handle_signal;
  sigaction(SIGINT, &sa, nullptr);
  sigaction(SIGTERM, &sa, nullptr);

  // Rotation trigger; detached so stdin EOF never stops the server.
  std::thread([&] {
    std::string line;
    while (std::getline(std::cin, line)) {
      if (line == "rotate") {
        SystemRandom rotation_rng;
        core->rotate_keys(rotation_rng);
        try {
          cli::save_keypair(key_file, core->current_keypair());
        } catch (const std::exception& e) {
          cli::log_line(std::string("key persistence failed: ") + e.what());
        }
        std::printf("%s\n",
                    base64_encode(seal::encode_key_config(core->config())).c_str());
        std::fflush(stdout);
        cli::log_line("rotated to key id " + std::to_string(core->config().key_id));
      }
    }
  }).detach();

  std::vector<std::thread> workers;
  for (int i = 0; i < 2; ++i) {
    workers.emplace_back([&] {
      while (!g_stop) {
        auto exchange = listener->accept_exchange(250);
        if (!exchange) continue;
        try {
          exchange->reply(core->handle_query(exchange->request));
        } catch (const Error& e) {
          cli::log_line(std::string("dropped exchange: ") + e.what());
          exchange->reset();
        }
      }
    });
  }

  while (!g_stop) {
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
  listener->shutdown();
  for (auto& worker : workers) worker.join();
  return 0;
}
