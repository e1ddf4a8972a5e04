#include "odoq/transport.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <openssl/err.h>
#include <openssl/evp.h>
#include <openssl/ssl.h>
#include <openssl/x509.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <thread>
#include <vector>

#include "odoq/bytes.hpp"
#include "odoq/random.hpp"

namespace odoq::net {

namespace {

constexpr uint8_t kFlagData = 0;
constexpr uint8_t kFlagReset = 1;
constexpr size_t kFrameHeaderSize = 9;
// Envelope bound plus framing slack.
constexpr size_t kMaxFrameBody = env::kMaxPayload + 4096;
constexpr int kIdleTimeoutMs = 30'000;
constexpr int kReplyWaitMs = 30'000;

void ignore_sigpipe_once() {
  // A peer closing mid-write must surface as an error, not kill the process.
  static std::once_flag flag;
  std::call_once(flag, [] { ::signal(SIGPIPE, SIG_IGN); });
}

std::string ssl_error_text(std::string_view prefix) {
  unsigned long code = ERR_get_error();
  char buf[256] = "unknown";
  if (code != 0) ERR_error_string_n(code, buf, sizeof(buf));
  ERR_clear_error();
  return std::string(prefix) + ": " + buf;
}

struct SslCtxDeleter {
  void operator()(SSL_CTX* p) const { SSL_CTX_free(p); }
};
struct SslDeleter {
  void operator()(SSL* p) const { SSL_free(p); }
};
using SslCtxPtr = std::unique_ptr<SSL_CTX, SslCtxDeleter>;
using SslPtr = std::unique_ptr<SSL, SslDeleter>;

void set_socket_timeouts(int fd, int ms) {
  timeval tv{};
  tv.tv_sec = ms / 1000;
  tv.tv_usec = (ms % 1000) * 1000;
  setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
  setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof(tv));
}

int tcp_connect(const EndpointAddr& addr, int timeout_ms) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* result = nullptr;
  std::string port = std::to_string(addr.port);
  if (getaddrinfo(addr.host.c_str(), port.c_str(), &hints, &result) != 0) {
    throw ConnectFailed("cannot resolve " + addr.to_string());
  }
  int fd = -1;
  std::string last_error = "no addresses";
  for (addrinfo* ai = result; ai != nullptr; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, SOCK_STREAM | SOCK_NONBLOCK, 0);
    if (fd < 0) continue;
    int rc = ::connect(fd, ai->ai_addr, ai->ai_addrlen);
    if (rc != 0 && errno == EINPROGRESS) {
      pollfd pfd{fd, POLLOUT, 0};
      int polled = ::poll(&pfd, 1, timeout_ms);
      if (polled == 1) {
        int err = 0;
        socklen_t len = sizeof(err);
        getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len);
        rc = (err == 0) ? 0 : -1;
        if (err != 0) last_error = std::strerror(err);
      } else {
        rc = -1;
        last_error = polled == 0 ? "connect timed out" : "connect poll failed";
      }
    } else if (rc != 0) {
      last_error = std::strerror(errno);
    }
    if (rc == 0) {
      int flags = fcntl(fd, F_GETFL, 0);
      fcntl(fd, F_SETFL, flags & ~O_NONBLOCK);
      int one = 1;
      setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
      break;
    }
    ::close(fd);
    fd = -1;
  }
  freeaddrinfo(result);
  if (fd < 0) {
    throw ConnectFailed("connect to " + addr.to_string() + " failed: " + last_error);
  }
  return fd;
}

std::string peer_fingerprint(SSL* ssl) {
  X509* cert = SSL_get_peer_certificate(ssl);
  if (cert == nullptr) throw TlsFailed("server sent no certificate");
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  int ok = X509_digest(cert, EVP_sha256(), digest, &len);
  X509_free(cert);
  if (ok != 1) throw TlsFailed("certificate digest failed");
  return to_hex({digest, len});
}

int alpn_select(SSL*, const unsigned char** out, unsigned char* out_len,
                const unsigned char* in, unsigned int in_len, void*) {
  const unsigned char* cursor = in;
  const unsigned char* end = in + in_len;
  while (cursor + 1 <= end) {
    size_t len = *cursor;
    if (cursor + 1 + len > end) break;
    if (len == kAlpn.size() &&
        std::memcmp(cursor + 1, kAlpn.data(), len) == 0) {
      *out = cursor + 1;
      *out_len = static_cast<unsigned char>(len);
      return SSL_TLSEXT_ERR_OK;
    }
    cursor += 1 + len;
  }
  return SSL_TLSEXT_ERR_ALERT_FATAL;
}

struct Frame {
  uint32_t stream_id = 0;
  uint8_t flags = kFlagData;
  Bytes body;
};

// One TLS session with all SSL use serialized behind a mutex.
class SecureConn {
 public:
  SecureConn(int fd, SslPtr ssl) : fd_(fd), ssl_(std::move(ssl)) {}

  ~SecureConn() { close(); }

  void write_frame(uint32_t stream_id, uint8_t flags, ByteView body) {
    ByteWriter w;
    w.u32(stream_id);
    w.u8(flags);
    w.u32(static_cast<uint32_t>(body.size()));
    w.raw(body);
    Bytes frame = w.take();

    std::lock_guard lock(io_mutex_);
    if (closed_) throw TransportError("connection closed");
    size_t off = 0;
    while (off < frame.size()) {
      int n = SSL_write(ssl_.get(), frame.data() + off,
                        static_cast<int>(frame.size() - off));
      if (n <= 0) {
        mark_dead();
        throw_ssl_error(n, "write");
      }
      off += static_cast<size_t>(n);
    }
  }

  Frame read_frame() {
    std::lock_guard lock(io_mutex_);
    if (closed_) throw TransportError("connection closed");
    uint8_t header[kFrameHeaderSize];
    read_exact(header, sizeof(header));
    Frame f;
    f.stream_id = static_cast<uint32_t>(header[0]) << 24 |
                  static_cast<uint32_t>(header[1]) << 16 |
                  static_cast<uint32_t>(header[2]) << 8 | header[3];
    f.flags = header[4];
    uint32_t len = static_cast<uint32_t>(header[5]) << 24 |
                   static_cast<uint32_t>(header[6]) << 16 |
                   static_cast<uint32_t>(header[7]) << 8 | header[8];
    if (len > kMaxFrameBody) {
      mark_dead();
      throw FramingError("frame body too large");
    }
    f.body.resize(len);
    if (len > 0) read_exact(f.body.data(), len);
    return f;
  }

  void set_timeouts(int ms) { set_socket_timeouts(fd_, ms); }

  bool alive() const {
    std::lock_guard lock(io_mutex_);
    return !closed_ && !dead_;
  }

  // Wakes any blocked read/write; the owner still calls close().
  void shutdown_socket() {
    std::lock_guard lock(fd_mutex_);
    if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
  }

  void close() {
    std::lock_guard io(io_mutex_);
    if (!closed_) {
      closed_ = true;
      std::lock_guard fds(fd_mutex_);
      if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
      }
    }
  }

 private:
  void mark_dead() { dead_ = true; }

  [[noreturn]] void throw_ssl_error(int rc, std::string_view what) {
    int err = SSL_get_error(ssl_.get(), rc);
    if (err == SSL_ERROR_ZERO_RETURN) {
      throw TransportError("peer closed the connection");
    }
    // Sockets are blocking with SO_RCVTIMEO/SO_SNDTIMEO, so a retryable
    // EAGAIN (reported either way) means the timeout fired.
    if (err == SSL_ERROR_WANT_READ || err == SSL_ERROR_WANT_WRITE ||
        (err == SSL_ERROR_SYSCALL && (errno == EAGAIN || errno == EWOULDBLOCK))) {
      throw Timeout(std::string(what) + " timed out");
    }
    throw TransportError(ssl_error_text(std::string(what) + " failed"));
  }

  void read_exact(uint8_t* out, size_t n) {
    size_t off = 0;
    while (off < n) {
      int rc = SSL_read(ssl_.get(), out + off, static_cast<int>(n - off));
      if (rc <= 0) {
        mark_dead();
        throw_ssl_error(rc, "read");
      }
      off += static_cast<size_t>(rc);
    }
  }

  int fd_;
  SslPtr ssl_;
  mutable std::mutex io_mutex_;
  std::mutex fd_mutex_;
  bool closed_ = false;
  std::atomic<bool> dead_ = false;
};

std::mutex g_establishments_mutex;
std::map<std::string, uint64_t> g_establishments;

void count_establishment(const EndpointAddr& addr) {
  std::lock_guard lock(g_establishments_mutex);
  ++g_establishments[addr.to_string()];
}

}  // namespace

EndpointAddr EndpointAddr::parse_uri(std::string_view uri) {
  env::TargetUri t = env::parse_target_uri(uri);
  return EndpointAddr{t.host, t.port};
}

EndpointAddr EndpointAddr::parse_hostport(std::string_view text) {
  // Unlike the target-URI grammar, listen addresses may use port 0 to ask
  // the OS for a free port.
  size_t colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw Malformed("expected host:port");
  }
  EndpointAddr out;
  out.host = std::string(text.substr(0, colon));
  std::string_view port_text = text.substr(colon + 1);
  if (port_text.empty()) throw Malformed("expected host:port");
  unsigned port = 0;
  for (char c : port_text) {
    if (c < '0' || c > '9') throw Malformed("bad port");
    port = port * 10 + static_cast<unsigned>(c - '0');
    if (port > 0xffff) throw Malformed("port out of range");
  }
  out.port = static_cast<uint16_t>(port);
  return out;
}

std::string EndpointAddr::to_string() const {
  return host + ":" + std::to_string(port);
}

uint64_t establishment_count(const EndpointAddr& addr) {
  std::lock_guard lock(g_establishments_mutex);
  auto it = g_establishments.find(addr.to_string());
  return it == g_establishments.end() ? 0 : it->second;
}

void reset_establishment_counts() {
  std::lock_guard lock(g_establishments_mutex);
  g_establishments.clear();
}

// ---------------------------------------------------------------------------
// ServerIdentity

struct ServerIdentity::Impl {
  EVP_PKEY* key = nullptr;
  X509* cert = nullptr;
  ~Impl() {
    EVP_PKEY_free(key);
    X509_free(cert);
  }
};

ServerIdentity::ServerIdentity() : impl_(std::make_unique<Impl>()) {}
ServerIdentity::~ServerIdentity() = default;
ServerIdentity::ServerIdentity(ServerIdentity&&) noexcept = default;
ServerIdentity& ServerIdentity::operator=(ServerIdentity&&) noexcept = default;

ServerIdentity ServerIdentity::generate(const std::string& common_name) {
  ServerIdentity identity;

  EVP_PKEY_CTX* pctx = EVP_PKEY_CTX_new_id(EVP_PKEY_ED25519, nullptr);
  if (pctx == nullptr || EVP_PKEY_keygen_init(pctx) != 1 ||
      EVP_PKEY_keygen(pctx, &identity.impl_->key) != 1) {
    EVP_PKEY_CTX_free(pctx);
    throw TlsFailed(ssl_error_text("ed25519 keygen failed"));
  }
  EVP_PKEY_CTX_free(pctx);

  X509* cert = X509_new();
  if (cert == nullptr) throw TlsFailed("certificate allocation failed");
  identity.impl_->cert = cert;
  X509_set_version(cert, 2);
  uint8_t serial_bytes[8];
  SystemRandom().fill(serial_bytes);
  ASN1_INTEGER_set_uint64(X509_get_serialNumber(cert),
                          static_cast<uint64_t>(serial_bytes[0]) << 24 |
                              serial_bytes[1] << 16 | serial_bytes[2] << 8 |
                              serial_bytes[3]);
  X509_gmtime_adj(X509_getm_notBefore(cert), -3600);
  X509_gmtime_adj(X509_getm_notAfter(cert), 60L * 60 * 24 * 365);
  X509_NAME* name = X509_get_subject_name(cert);
  X509_NAME_add_entry_by_txt(name, "CN", MBSTRING_ASC,
                             reinterpret_cast<const unsigned char*>(common_name.c_str()),
                             -1, -1, 0);
  X509_set_issuer_name(cert, name);
  X509_set_pubkey(cert, identity.impl_->key);
  // Ed25519 signs without a separate digest.
  if (X509_sign(cert, identity.impl_->key, nullptr) == 0) {
    throw TlsFailed(ssl_error_text("certificate signing failed"));
  }
  return identity;
}

std::string ServerIdentity::fingerprint() const {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (X509_digest(impl_->cert, EVP_sha256(), digest, &len) != 1) {
    throw TlsFailed("certificate digest failed");
  }
  return to_hex({digest, len});
}

// ---------------------------------------------------------------------------
// Channel (client side)

struct Channel::Impl {
  std::unique_ptr<SecureConn> conn;
  SslCtxPtr ctx;
  std::mutex exchange_mutex;
  uint32_t next_stream = 1;
  int exchange_timeout_ms = 5000;
};

Channel::Channel(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
Channel::~Channel() = default;

std::unique_ptr<Channel> Channel::connect(const EndpointAddr& addr,
                                          const ConnectOptions& options) {
  ignore_sigpipe_once();

  SslCtxPtr ctx(SSL_CTX_new(TLS_client_method()));
  if (!ctx) throw TlsFailed(ssl_error_text("client context"));
  SSL_CTX_set_min_proto_version(ctx.get(), TLS1_3_VERSION);
  // Authentication is by fingerprint pin after the handshake.
  SSL_CTX_set_verify(ctx.get(), SSL_VERIFY_NONE, nullptr);

  int fd = tcp_connect(addr, options.connect_timeout_ms);
  set_socket_timeouts(fd, options.connect_timeout_ms);

  SslPtr ssl(SSL_new(ctx.get()));
  if (!ssl) {
    ::close(fd);
    throw TlsFailed(ssl_error_text("ssl allocation"));
  }
  SSL_set_fd(ssl.get(), fd);
  SSL_set_tlsext_host_name(ssl.get(), addr.host.c_str());
  std::string alpn;
  alpn.push_back(static_cast<char>(kAlpn.size()));
  alpn += kAlpn;
  SSL_set_alpn_protos(ssl.get(),
                      reinterpret_cast<const unsigned char*>(alpn.data()),
                      static_cast<unsigned>(alpn.size()));

  if (SSL_connect(ssl.get()) != 1) {
    std::string detail = ssl_error_text("tls handshake failed");
    ::close(fd);
    throw TlsFailed(detail);
  }

  const unsigned char* selected = nullptr;
  unsigned selected_len = 0;
  SSL_get0_alpn_selected(ssl.get(), &selected, &selected_len);
  if (selected_len != kAlpn.size() ||
      std::memcmp(selected, kAlpn.data(), selected_len) != 0) {
    ::close(fd);
    throw TlsFailed("server did not negotiate odoq/1");
  }

  std::string fingerprint = peer_fingerprint(ssl.get());
  if (options.pinned_fingerprint && *options.pinned_fingerprint != fingerprint) {
    ::close(fd);
    throw TlsFailed("certificate fingerprint does not match the pin");
  }

  auto impl = std::make_unique<Impl>();
  impl->ctx = std::move(ctx);
  impl->conn = std::make_unique<SecureConn>(fd, std::move(ssl));
  impl->exchange_timeout_ms = options.exchange_timeout_ms;
  impl->conn->set_timeouts(options.exchange_timeout_ms);

  count_establishment(addr);
  return std::unique_ptr<Channel>(new Channel(std::move(impl)));
}

env::Envelope Channel::exchange(const env::Envelope& request) {
  std::lock_guard lock(impl_->exchange_mutex);
  Bytes wire;
  try {
    wire = env::encode_envelope(request);
  } catch (const Error& e) {
    throw FramingError(std::string("unsendable envelope: ") + e.what());
  }
  uint32_t stream_id = impl_->next_stream++;
  impl_->conn->write_frame(stream_id, kFlagData, wire);

  while (true) {
    Frame frame = impl_->conn->read_frame();
    if (frame.stream_id != stream_id) {
      continue;  // stale reply from an abandoned exchange
    }
    if (frame.flags == kFlagReset) {
      throw StreamReset("server reset the stream");
    }
    try {
      return env::decode_envelope(frame.body);
    } catch (const Error& e) {
      throw FramingError(std::string("undecodable reply: ") + e.what());
    }
  }
}

bool Channel::alive() const { return impl_->conn->alive(); }

void Channel::close() { impl_->conn->close(); }

std::shared_ptr<Channel> ChannelPool::get(const EndpointAddr& addr,
                                          const ConnectOptions& options) {
  std::lock_guard lock(mutex_);
  auto it = channels_.find(addr.to_string());
  if (it != channels_.end() && it->second->alive()) {
    return it->second;
  }
  std::shared_ptr<Channel> channel = Channel::connect(addr, options);
  channels_[addr.to_string()] = channel;
  return channel;
}

// ---------------------------------------------------------------------------
// Listener (server side)

namespace {

struct PendingReply {
  std::mutex mutex;
  std::condition_variable cv;
  bool done = false;
  bool reset = false;
  Bytes payload;
};

}  // namespace

struct Listener::Impl {
  int listen_fd = -1;
  uint16_t port = 0;
  SslCtxPtr ctx;
  std::atomic<bool> stopping = false;

  std::thread accept_thread;
  std::mutex conns_mutex;
  struct ConnRec {
    std::shared_ptr<SecureConn> conn;
    std::thread thread;
  };
  std::vector<ConnRec> conns;
  uint64_t next_conn_id = 1;

  std::mutex queue_mutex;
  std::condition_variable queue_cv;
  std::deque<Exchange> queue;

  std::mutex hook_mutex;
  std::function<void(uint64_t)> disconnect_hook;

  void serve_connection(std::shared_ptr<SecureConn> conn, uint64_t conn_id);
  void accept_loop();
  void push_exchange(Exchange e) {
    std::lock_guard lock(queue_mutex);
    queue.push_back(std::move(e));
    queue_cv.notify_one();
  }
};

Listener::Listener(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}

Listener::~Listener() { shutdown(); }

std::unique_ptr<Listener> Listener::bind(const std::string& host, uint16_t port,
                                         const ServerIdentity& identity) {
  ignore_sigpipe_once();

  auto impl = std::make_unique<Impl>();
  impl->ctx.reset(SSL_CTX_new(TLS_server_method()));
  if (!impl->ctx) throw TlsFailed(ssl_error_text("server context"));
  SSL_CTX_set_min_proto_version(impl->ctx.get(), TLS1_3_VERSION);
  if (SSL_CTX_use_certificate(impl->ctx.get(), identity.impl()->cert) != 1 ||
      SSL_CTX_use_PrivateKey(impl->ctx.get(), identity.impl()->key) != 1) {
    throw TlsFailed(ssl_error_text("identity load failed"));
  }
  SSL_CTX_set_alpn_select_cb(impl->ctx.get(), alpn_select, nullptr);

  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  hints.ai_flags = AI_PASSIVE;
  addrinfo* result = nullptr;
  std::string port_text = std::to_string(port);
  if (getaddrinfo(host.c_str(), port_text.c_str(), &hints, &result) != 0) {
    throw ConnectFailed("cannot resolve listen address " + host);
  }
  int fd = -1;
  for (addrinfo* ai = result; ai != nullptr; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, SOCK_STREAM, 0);
    if (fd < 0) continue;
    int one = 1;
    setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    if (::bind(fd, ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(fd, 64) == 0) {
      break;
    }
    ::close(fd);
    fd = -1;
  }
  freeaddrinfo(result);
  if (fd < 0) throw ConnectFailed("bind to " + host + ":" + port_text + " failed");

  sockaddr_storage bound{};
  socklen_t bound_len = sizeof(bound);
  getsockname(fd, reinterpret_cast<sockaddr*>(&bound), &bound_len);
  if (bound.ss_family == AF_INET) {
    impl->port = ntohs(reinterpret_cast<sockaddr_in*>(&bound)->sin_port);
  } else {
    impl->port = ntohs(reinterpret_cast<sockaddr_in6*>(&bound)->sin6_port);
  }
  impl->listen_fd = fd;

  auto* raw = impl.get();
  impl->accept_thread = std::thread([raw] { raw->accept_loop(); });
  return std::unique_ptr<Listener>(new Listener(std::move(impl)));
}

void Listener::Impl::accept_loop() {
  while (!stopping) {
    int fd = ::accept(listen_fd, nullptr, nullptr);
    if (fd < 0) {
      if (stopping) break;
      if (errno == EINTR) continue;
      break;
    }
    int one = 1;
    setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    set_socket_timeouts(fd, 5000);

    SslPtr ssl(SSL_new(ctx.get()));
    if (!ssl) {
      ::close(fd);
      continue;
    }
    SSL_set_fd(ssl.get(), fd);
    if (SSL_accept(ssl.get()) != 1) {
      ERR_clear_error();
      ::close(fd);
      continue;
    }
    auto conn = std::make_shared<SecureConn>(fd, std::move(ssl));
    uint64_t conn_id;
    {
      std::lock_guard lock(conns_mutex);
      conn_id = next_conn_id++;
      conns.push_back({conn, std::thread([this, conn, conn_id] {
                         serve_connection(conn, conn_id);
                       })});
    }
  }
}

void Listener::Impl::serve_connection(std::shared_ptr<SecureConn> conn,
                                      uint64_t conn_id) {
  conn->set_timeouts(kIdleTimeoutMs);
  while (!stopping) {
    Frame frame;
    try {
      frame = conn->read_frame();
    } catch (const Error&) {
      break;  // idle timeout, peer close, or shutdown
    }
    if (frame.flags != kFlagData) continue;

    env::Envelope request;
    try {
      request = env::decode_envelope(frame.body);
    } catch (const Error&) {
      // Stream-level damage: reset just that stream.
      try {
        conn->write_frame(frame.stream_id, kFlagReset, {});
      } catch (const Error&) {
        break;
      }
      continue;
    }

    auto pending = std::make_shared<PendingReply>();
    Exchange exchange;
    exchange.request = std::move(request);
    exchange.connection_id = conn_id;
    exchange.reply = [pending](const env::Envelope& e) {
      std::lock_guard lock(pending->mutex);
      pending->payload = env::encode_envelope(e);
      pending->done = true;
      pending->cv.notify_one();
    };
    exchange.reset = [pending] {
      std::lock_guard lock(pending->mutex);
      pending->reset = true;
      pending->done = true;
      pending->cv.notify_one();
    };
    push_exchange(std::move(exchange));

    // Wait in slices so listener shutdown is never stuck behind a handler.
    std::unique_lock lock(pending->mutex);
    bool answered = false;
    for (int waited = 0; waited < kReplyWaitMs && !answered && !stopping;
         waited += 250) {
      answered = pending->cv.wait_for(lock, std::chrono::milliseconds(250),
                                      [&] { return pending->done; });
    }
    bool reset = !answered || pending->reset;
    Bytes payload = std::move(pending->payload);
    lock.unlock();

    try {
      if (reset) {
        conn->write_frame(frame.stream_id, kFlagReset, {});
      } else {
        conn->write_frame(frame.stream_id, kFlagData, payload);
      }
    } catch (const Error&) {
      break;
    }
  }
  conn->close();
  std::function<void(uint64_t)> hook;
  {
    std::lock_guard lock(hook_mutex);
    hook = disconnect_hook;
  }
  if (hook) hook(conn_id);
}

std::optional<Listener::Exchange> Listener::accept_exchange(int timeout_ms) {
  std::unique_lock lock(impl_->queue_mutex);
  auto ready = [&] { return !impl_->queue.empty() || impl_->stopping; };
  if (timeout_ms < 0) {
    impl_->queue_cv.wait(lock, ready);
  } else if (!impl_->queue_cv.wait_for(lock, std::chrono::milliseconds(timeout_ms),
                                       ready)) {
    return std::nullopt;
  }
  if (impl_->queue.empty()) return std::nullopt;
  Exchange e = std::move(impl_->queue.front());
  impl_->queue.pop_front();
  return e;
}

void Listener::set_disconnect_hook(std::function<void(uint64_t)> hook) {
  std::lock_guard lock(impl_->hook_mutex);
  impl_->disconnect_hook = std::move(hook);
}

uint16_t Listener::port() const { return impl_->port; }

void Listener::shutdown() {
  if (impl_->stopping.exchange(true)) return;
  if (impl_->listen_fd >= 0) {
    ::shutdown(impl_->listen_fd, SHUT_RDWR);
    ::close(impl_->listen_fd);
    impl_->listen_fd = -1;
  }
  if (impl_->accept_thread.joinable()) impl_->accept_thread.join();

  std::vector<Impl::ConnRec> conns;
  {
    std::lock_guard lock(impl_->conns_mutex);
    conns.swap(impl_->conns);
  }
  for (auto& rec : conns) {
    rec.conn->shutdown_socket();
  }
  impl_->queue_cv.notify_all();
  for (auto& rec : conns) {
    if (rec.thread.joinable()) rec.thread.join();
  }
}

}  // namespace odoq::net
