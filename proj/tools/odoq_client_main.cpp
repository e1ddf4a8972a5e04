// odoq-client: resolves one domain through the proxy. Prints one
// `<domain> <ip>` line per A answer on standard output.
//
// Exit codes: 0 answer, 2 name error, 3 rejected (verification or
// decryption failure), 4 transport error, 1 usage/config error.

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <thread>

#include "cli_util.hpp"
#include "odoq/client.hpp"
#include "odoq/transport.hpp"

int main(int argc, char** argv) {
  CLI::App app{"ODoQ client: resolve a domain through an oblivious proxy"};
  std::string proxy_hostport;
  std::string resolver_uri;
  std::string key_argument;
  std::string pin_proxy;
  unsigned retry_delay_ms = 0;
  unsigned timeout_ms = 5000;
  std::string domain_argument;
  app.add_option("--proxy", proxy_hostport, "proxy host:port")->required();
  app.add_option("--resolver", resolver_uri, "resolver URI (quic://host:port)")
      ->required();
  app.add_option("--key", key_argument,
                 "resolver key config, base64 or @path to a file holding it")
      ->required();
  app.add_option("--pin-proxy", pin_proxy,
                 "expected SHA-256 fingerprint of the proxy certificate");
  app.add_option("--retry-delay-ms", retry_delay_ms,
                 "pause before the key-update retry (rotation-window testing)");
  app.add_option("--timeout-ms", timeout_ms, "connect and exchange timeout");
  app.add_option("domain", domain_argument, "domain to resolve")->required();
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  using namespace odoq;

  dns::Name domain;
  seal::KeyConfig config;
  net::EndpointAddr proxy_addr;
  try {
    domain = dns::Name::parse(domain_argument);
    config = cli::parse_key_argument(key_argument);
    proxy_addr = net::EndpointAddr::parse_hostport(proxy_hostport);
    (void)net::EndpointAddr::parse_uri(resolver_uri);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "odoq-client: %s\n", e.what());
    return 1;
  }

  SystemRandom rng;
  auto [session, envelope] =
      client::Session::start(domain, resolver_uri, config, rng);

  net::ConnectOptions options;
  options.connect_timeout_ms = static_cast<int>(timeout_ms);
  options.exchange_timeout_ms = static_cast<int>(timeout_ms);
  if (!pin_proxy.empty()) options.pinned_fingerprint = pin_proxy;

  try {
    auto channel = net::Channel::connect(proxy_addr, options);
    env::Envelope reply = channel->exchange(envelope);
    while (true) {
      client::Outcome outcome = session.on_envelope(reply);
      if (auto* answer = std::get_if<client::Answer>(&outcome)) {
        std::string printable = domain.to_string();
        for (const auto& addr : answer->addresses) {
          std::printf("%s %s\n", printable.c_str(), dns::format_ipv4(addr).c_str());
        }
        return 0;
      }
      if (std::get_if<client::NameError>(&outcome)) {
        std::fprintf(stderr, "odoq-client: %s: no such domain\n",
                     domain.to_string().c_str());
        return 2;
      }
      if (auto* reject = std::get_if<client::Reject>(&outcome)) {
        std::fprintf(stderr, "odoq-client: rejected: %s\n",
                     std::string(client::to_string(reject->reason)).c_str());
        return 3;
      }
      auto& retry = std::get<client::Retry>(outcome);
      std::fprintf(stderr, "odoq-client: key update received, retrying\n");
      if (retry_delay_ms > 0) {
        std::this_thread::sleep_for(std::chrono::milliseconds(retry_delay_ms));
      }
      // Same channel: recovery must not establish a new connection.
      reply = channel->exchange(retry.envelope);
    }
  } catch (const net::TransportError& e) {
    std::fprintf(stderr, "odoq-client: transport: %s\n", e.what());
    return 4;
  }
}
