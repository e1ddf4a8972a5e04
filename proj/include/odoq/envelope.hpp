#pragma once

#include <cstdint>
#include <string>

#include "odoq/bytes.hpp"
#include "odoq/errors.hpp"

// Framed protocol message carried on every hop.
//
//   version u8 | msg_type u8 | target_len u16 | target_uri | payload_len u32 | payload
//
// A fresh client query names the resolver in target_uri; the proxy strips
// it before forwarding. Payloads are opaque here: a SealedRequest encoding,
// a SealedResponse ciphertext, or a KeyConfig encoding.

namespace odoq::env {

class BadVersion : public Error {
 public:
  using Error::Error;
};

class UnknownMsgType : public Error {
 public:
  using Error::Error;
};

class WrongType : public Error {
 public:
  using Error::Error;
};

class Oversize : public Error {
 public:
  using Error::Error;
};

inline constexpr uint8_t kVersion = 0x01;
inline constexpr size_t kMaxPayload = 1 << 20;
inline constexpr size_t kMaxTargetUri = 0xffff;

enum class MsgType : uint8_t {
  kObliviousQuery = 0x01,
  kObliviousResponse = 0x02,
  kKeyUpdate = 0x03,
};

struct Envelope {
  uint8_t version = kVersion;
  MsgType msg_type = MsgType::kObliviousQuery;
  std::string target_uri;  // non-empty only on the client->proxy query hop
  Bytes payload;
  bool operator==(const Envelope&) const = default;
};

Envelope make_query(std::string target_uri, Bytes payload);
Envelope make_response(Bytes payload);
Envelope make_key_update(Bytes payload);

Bytes encode_envelope(const Envelope& e);
Envelope decode_envelope(ByteView wire);

// Identical envelope with the routing metadata removed; the payload bytes
// are untouched. Only valid on queries.
Envelope strip_target(const Envelope& e);

// "quic://host:port"
struct TargetUri {
  std::string host;
  uint16_t port = 0;
};
TargetUri parse_target_uri(std::string_view uri);

}  // namespace odoq::env
