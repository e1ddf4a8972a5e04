#include "odoq/envelope.hpp"

#include <charconv>

namespace odoq::env {

Envelope make_query(std::string target_uri, Bytes payload) {
  return Envelope{kVersion, MsgType::kObliviousQuery, std::move(target_uri),
                  std::move(payload)};
}

Envelope make_response(Bytes payload) {
  return Envelope{kVersion, MsgType::kObliviousResponse, {}, std::move(payload)};
}

Envelope make_key_update(Bytes payload) {
  return Envelope{kVersion, MsgType::kKeyUpdate, {}, std::move(payload)};
}

namespace {

bool known_type(uint8_t t) {
  return t == static_cast<uint8_t>(MsgType::kObliviousQuery) ||
         t == static_cast<uint8_t>(MsgType::kObliviousResponse) ||
         t == static_cast<uint8_t>(MsgType::kKeyUpdate);
}

}  // namespace

Bytes encode_envelope(const Envelope& e) {
  if (e.version != kVersion) throw BadVersion("unknown envelope version");
  if (!known_type(static_cast<uint8_t>(e.msg_type))) {
    throw UnknownMsgType("unknown envelope message type");
  }
  if (e.target_uri.size() > kMaxTargetUri) throw Oversize("target URI too long");
  if (!e.target_uri.empty() && e.msg_type != MsgType::kObliviousQuery) {
    throw Malformed("only queries carry a target URI");
  }
  if (e.payload.size() > kMaxPayload) throw Oversize("payload too large");
  ByteWriter w;
  w.u8(e.version);
  w.u8(static_cast<uint8_t>(e.msg_type));
  w.u16(static_cast<uint16_t>(e.target_uri.size()));
  w.raw(e.target_uri);
  w.u32(static_cast<uint32_t>(e.payload.size()));
  w.raw(e.payload);
  return w.take();
}

Envelope decode_envelope(ByteView wire) {
  ByteReader r{wire};
  Envelope e;
  e.version = r.u8();
  if (e.version != kVersion) throw BadVersion("unknown envelope version");
  uint8_t type = r.u8();
  if (!known_type(type)) throw UnknownMsgType("unknown envelope message type");
  e.msg_type = static_cast<MsgType>(type);
  uint16_t target_len = r.u16();
  ByteView target = r.raw(target_len);
  e.target_uri.assign(target.begin(), target.end());
  uint32_t payload_len = r.u32();
  if (payload_len > kMaxPayload) throw Oversize("payload too large");
  ByteView payload = r.raw(payload_len);
  e.payload.assign(payload.begin(), payload.end());
  if (!r.done()) throw Malformed("trailing bytes after envelope");
  if (!e.target_uri.empty() && e.msg_type != MsgType::kObliviousQuery) {
    throw Malformed("only queries carry a target URI");
  }
  return e;
}

Envelope strip_target(const Envelope& e) {
  if (e.msg_type != MsgType::kObliviousQuery) {
    throw WrongType("strip_target expects a query");
  }
  Envelope out = e;
  out.target_uri.clear();
  return out;
}

TargetUri parse_target_uri(std::string_view uri) {
  constexpr std::string_view kScheme = "quic://";
  if (uri.substr(0, kScheme.size()) != kScheme) {
    throw Malformed("target URI must use the quic:// scheme");
  }
  std::string_view rest = uri.substr(kScheme.size());
  size_t colon = rest.rfind(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == rest.size()) {
    throw Malformed("target URI must be quic://host:port");
  }
  TargetUri out;
  out.host = std::string(rest.substr(0, colon));
  std::string_view port_text = rest.substr(colon + 1);
  unsigned port = 0;
  auto [ptr, ec] = std::from_chars(port_text.begin(), port_text.end(), port);
  if (ec != std::errc() || ptr != port_text.end() || port == 0 || port > 0xffff) {
    throw Malformed("target URI port out of range");
  }
  out.port = static_cast<uint16_t>(port);
  return out;
}

}  // namespace odoq::env
