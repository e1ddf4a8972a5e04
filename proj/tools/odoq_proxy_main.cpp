// odoq-proxy: the oblivious relay. Forwards sealed payloads to allowlisted
// resolvers and relays replies back; it never holds key material and cannot
// read what it forwards.

#include <CLI11.hpp>
#include <csignal>
#include <thread>
#include <vector>

#include "cli_util.hpp"
#include "odoq/proxy.hpp"
#include "odoq/transport.hpp"

namespace {

std::atomic<bool> g_stop{false};

void handle_signal(int) { g_stop = true; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ODoQ proxy: forwards sealed queries to allowlisted resolvers"};
  std::string listen = "127.0.0.1:8443";
  std::vector<std::string> allow;
  std::string resolver_pin;
  app.add_option("--listen", listen, "host:port to listen on (port 0 picks a free port)");
  app.add_option("--allow", allow, "resolver URI (quic://host:port) to forward to; repeatable")
      ->required();
  app.add_option("--resolver-pin", resolver_pin,
                 "expected SHA-256 fingerprint of the resolver certificate");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  using namespace odoq;

  std::unique_ptr<net::Listener> listener;
  std::unique_ptr<proxy::Core> core;
  try {
    for (const auto& uri : allow) {
      (void)net::EndpointAddr::parse_uri(uri);  // validate up front
    }
    core = std::make_unique<proxy::Core>(proxy::Config{allow});
    net::EndpointAddr addr = net::EndpointAddr::parse_hostport(listen);
    net::ServerIdentity identity = net::ServerIdentity::generate("odoq-proxy");
    listener = net::Listener::bind(addr.host, addr.port, identity);
    cli::log_line("listening=" + addr.host + ":" + std::to_string(listener->port()));
    cli::log_line("tls-fingerprint=" + identity.fingerprint());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "odoq-proxy: %s\n", e.what());
    return 1;
  }

  listener->set_disconnect_hook(
      [&](uint64_t connection_id) { core->retire_channel(connection_id); });

  struct sigaction sa{};
  sa.sa_handler = handle_signal;
  sigaction(SIGINT, &sa, nullptr);
  sigaction(SIGTERM, &sa, nullptr);

  net::ChannelPool pool;
  net::ConnectOptions resolver_options;
  if (!resolver_pin.empty()) resolver_options.pinned_fingerprint = resolver_pin;

  std::vector<std::thread> workers;
  for (int i = 0; i < 4; ++i) {
    workers.emplace_back([&] {
      while (!g_stop) {
        auto exchange = listener->accept_exchange(250);
        if (!exchange) continue;

        auto decision =
            core->on_client_query(exchange->request, exchange->connection_id);
        if (auto* deny = std::get_if<proxy::Deny>(&decision)) {
          cli::log_line("deny " + std::string(proxy::to_string(deny->reason)) +
                        " target=" + exchange->request.target_uri);
          exchange->reset();
          continue;
        }
        auto& forward = std::get<proxy::Forward>(decision);
        try {
          net::EndpointAddr addr = net::EndpointAddr::parse_uri(forward.resolver_uri);
          auto channel = pool.get(addr, resolver_options);
          env::Envelope reply = channel->exchange(forward.envelope);
          auto relay = core->on_resolver_reply(forward.slot, reply);
          if (std::get_if<proxy::UnknownSlot>(&relay)) {
            exchange->reset();
            continue;
          }
          exchange->reply(std::get<proxy::Relay>(relay).envelope);
        } catch (const Error& e) {
          cli::log_line("deny timeout-or-error target=" + forward.resolver_uri +
                        " detail=" + e.what());
          core->retire(forward.slot);
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
