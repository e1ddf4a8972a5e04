#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "odoq/envelope.hpp"
#include "odoq/errors.hpp"

// Real-network binding for the cores: encrypted TLS 1.3 sessions (ALPN
// "odoq/1") carrying length-framed logical streams, one envelope exchange
// per stream. A reply of KEY_UPDATE leaves the connection open and the
// retry rides a new stream of the same session, so recovery never
// re-establishes a connection.
//
// Frame layout on the wire, after TLS:
//   stream_id u32 | flags u8 (0 data, 1 reset) | length u32 | envelope bytes
//
// Servers present an ephemeral self-signed Ed25519 certificate; clients
// authenticate it by SHA-256 fingerprint pin. Without a pin the session is
// still encrypted but unauthenticated.

namespace odoq::net {

class TransportError : public Error {
 public:
  using Error::Error;
};

class ConnectFailed : public TransportError {
 public:
  using TransportError::TransportError;
};

class TlsFailed : public TransportError {
 public:
  using TransportError::TransportError;
};

class Timeout : public TransportError {
 public:
  using TransportError::TransportError;
};

class StreamReset : public TransportError {
 public:
  using TransportError::TransportError;
};

// Bad framing or an undecodable envelope on a stream.
class FramingError : public TransportError {
 public:
  using TransportError::TransportError;
};

inline constexpr std::string_view kAlpn = "odoq/1";
inline constexpr uint16_t kDefaultResolverPort = 8853;
inline constexpr uint16_t kDefaultProxyPort = 8443;

struct EndpointAddr {
  std::string host;
  uint16_t port = 0;

  // Accepts "quic://host:port" (the envelope target grammar).
  static EndpointAddr parse_uri(std::string_view uri);
  // Accepts "host:port".
  static EndpointAddr parse_hostport(std::string_view text);
  std::string to_string() const;
};

// Ephemeral TLS server identity (Ed25519 key + self-signed certificate).
class ServerIdentity {
 public:
  static ServerIdentity generate(const std::string& common_name);
  ~ServerIdentity();
  ServerIdentity(ServerIdentity&&) noexcept;
  ServerIdentity& operator=(ServerIdentity&&) noexcept;
  ServerIdentity(const ServerIdentity&) = delete;
  ServerIdentity& operator=(const ServerIdentity&) = delete;

  // Lowercase hex SHA-256 of the DER certificate.
  std::string fingerprint() const;

  struct Impl;
  Impl* impl() const { return impl_.get(); }

 private:
  ServerIdentity();
  std::unique_ptr<Impl> impl_;
};

struct ConnectOptions {
  // Expected server certificate fingerprint; unauthenticated when absent.
  std::optional<std::string> pinned_fingerprint;
  int connect_timeout_ms = 5000;
  int exchange_timeout_ms = 5000;
};

// Client side of one established session.
class Channel {
 public:
  static std::unique_ptr<Channel> connect(const EndpointAddr& addr,
                                          const ConnectOptions& options = {});
  ~Channel();

  // One request, one reply, on a fresh stream of this session.
  env::Envelope exchange(const env::Envelope& request);

  bool alive() const;
  void close();

  struct Impl;

 private:
  explicit Channel(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
};

// Process-wide session-establishment counter, keyed by "host:port".
uint64_t establishment_count(const EndpointAddr& addr);
void reset_establishment_counts();

// One live channel per peer, shared across slots; reconnects dead channels.
class ChannelPool {
 public:
  std::shared_ptr<Channel> get(const EndpointAddr& addr,
                               const ConnectOptions& options = {});

 private:
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Channel>> channels_;
};

class Listener {
 public:
  struct Exchange {
    env::Envelope request;
    uint64_t connection_id = 0;
    std::function<void(const env::Envelope&)> reply;
    std::function<void()> reset;
  };

  static std::unique_ptr<Listener> bind(const std::string& host, uint16_t port,
                                        const ServerIdentity& identity);
  ~Listener();

  // Next pending request from any connection; nullopt on timeout or after
  // shutdown. Negative timeout blocks until shutdown.
  std::optional<Exchange> accept_exchange(int timeout_ms = -1);

  // Invoked when a client connection goes away.
  void set_disconnect_hook(std::function<void(uint64_t)> hook);

  uint16_t port() const;
  void shutdown();

  struct Impl;

 private:
  explicit Listener(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
};

}  // namespace odoq::net
