#include "odoq/dns.hpp"

#include <algorithm>
#include <cctype>

namespace odoq::dns {

namespace {

constexpr size_t kHeaderSize = 12;
constexpr size_t kMaxNameEncoding = 255;
constexpr size_t kMaxLabel = 63;

char to_lower_ascii(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

}  // namespace

Name::Name(std::vector<std::string> labels) : labels_(std::move(labels)) {
  validate();
}

void Name::validate() const {
  if (labels_.empty()) throw InvalidName("name needs at least one label");
  for (const auto& label : labels_) {
    if (label.empty()) throw InvalidName("empty label");
    if (label.size() > kMaxLabel) throw InvalidName("label longer than 63 bytes");
  }
  if (encoded_size() > kMaxNameEncoding) {
    throw InvalidName("encoded name longer than 255 bytes");
  }
}

Name Name::parse(std::string_view presentation) {
  if (!presentation.empty() && presentation.back() == '.') {
    presentation.remove_suffix(1);
  }
  std::vector<std::string> labels;
  size_t start = 0;
  while (start <= presentation.size()) {
    size_t dot = presentation.find('.', start);
    if (dot == std::string_view::npos) dot = presentation.size();
    labels.emplace_back(presentation.substr(start, dot - start));
    start = dot + 1;
    if (dot == presentation.size()) break;
  }
  return Name(std::move(labels));
}

std::string Name::to_string() const {
  std::string out;
  for (size_t i = 0; i < labels_.size(); ++i) {
    if (i > 0) out.push_back('.');
    out += labels_[i];
  }
  return out;
}

std::string Name::lowered() const {
  std::string out = to_string();
  std::transform(out.begin(), out.end(), out.begin(), to_lower_ascii);
  return out;
}

size_t Name::encoded_size() const {
  size_t n = 1;  // terminal zero
  for (const auto& label : labels_) n += 1 + label.size();
  return n;
}

bool Name::equals_ci(const Name& other) const {
  return lowered() == other.lowered();
}

Message make_query(const Name& name, uint16_t qtype, uint16_t txid) {
  Message m;
  m.txid = txid;
  m.question = Question{name, qtype, kClassIn};
  return m;
}

namespace {

void encode_name(ByteWriter& w, const Name& name) {
  for (const auto& label : name.labels()) {
    w.u8(static_cast<uint8_t>(label.size()));
    w.raw(label);
  }
  w.u8(0);
}

// Reads a name starting at `pos` in the full message. Pointers may only
// jump to strictly earlier offsets, which also rules out cycles.
Name decode_name(ByteView wire, size_t& pos) {
  std::vector<std::string> labels;
  size_t cursor = pos;
  size_t name_bytes = 0;  // uncompressed equivalent length, for the 255 cap
  bool jumped = false;
  size_t lowest_seen = cursor;

  while (true) {
    if (cursor >= wire.size()) throw Truncated("name runs past end of message");
    uint8_t len = wire[cursor];
    if ((len & 0xc0) == 0xc0) {
      if (cursor + 1 >= wire.size()) throw Truncated("pointer missing low byte");
      size_t target = static_cast<size_t>(len & 0x3f) << 8 | wire[cursor + 1];
      if (!jumped) pos = cursor + 2;
      if (target >= lowest_seen) throw BadPointer("pointer does not target an earlier offset");
      lowest_seen = target;
      cursor = target;
      jumped = true;
      continue;
    }
    if ((len & 0xc0) != 0) throw Malformed("reserved label type");
    if (len == 0) {
      if (!jumped) pos = cursor + 1;
      break;
    }
    if (cursor + 1 + len > wire.size()) throw Malformed("label overruns message");
    labels.emplace_back(reinterpret_cast<const char*>(wire.data() + cursor + 1), len);
    name_bytes += 1 + len;
    if (name_bytes + 1 > kMaxNameEncoding) throw Malformed("name longer than 255 bytes");
    cursor += 1 + len;
  }
  if (labels.empty()) throw Malformed("root-only name not supported");
  return Name(std::move(labels));
}

void check_a_rdata(const ResourceRecord& rr) {
  if (rr.rtype == kTypeA && rr.rclass == kClassIn && rr.rdata.size() != 4) {
    throw Malformed("A record rdata must be 4 bytes");
  }
}

}  // namespace

Bytes encode_message(const Message& msg) {
  if (!msg.is_response) {
    if (!msg.answers.empty()) throw Malformed("query with answers");
    if (msg.rcode != kRcodeNoError) throw Malformed("query with nonzero rcode");
  }
  if (msg.rcode > 0x0f) throw Malformed("rcode wider than 4 bits");

  ByteWriter w;
  w.u16(msg.txid);
  // Canonical flags: queries RD (0x0100), responses QR|RD|RA (0x8180).
  uint16_t flags = msg.is_response ? 0x8180 : 0x0100;
  flags |= msg.rcode;
  w.u16(flags);
  w.u16(1);
  w.u16(static_cast<uint16_t>(msg.answers.size()));
  w.u16(0);
  w.u16(0);

  encode_name(w, msg.question.name);
  w.u16(msg.question.qtype);
  w.u16(msg.question.qclass);

  for (const auto& rr : msg.answers) {
    check_a_rdata(rr);
    if (rr.rdata.size() > 0xffff) throw Malformed("rdata too long");
    encode_name(w, rr.name);
    w.u16(rr.rtype);
    w.u16(rr.rclass);
    w.u32(rr.ttl);
    w.u16(static_cast<uint16_t>(rr.rdata.size()));
    w.raw(rr.rdata);
  }
  return w.take();
}

Message decode_message(ByteView wire) {
  if (wire.size() < kHeaderSize) throw Truncated("message shorter than header");

  ByteReader header(wire.subspan(0, kHeaderSize));
  Message m;
  m.txid = header.u16();
  uint16_t flags = header.u16();
  m.is_response = (flags & 0x8000) != 0;
  m.rcode = static_cast<uint8_t>(flags & 0x000f);
  uint16_t qdcount = header.u16();
  uint16_t ancount = header.u16();
  uint16_t nscount = header.u16();
  uint16_t arcount = header.u16();
  if (qdcount != 1) throw Malformed("exactly one question expected");
  if (nscount != 0 || arcount != 0) {
    throw Malformed("authority/additional sections not supported");
  }

  size_t pos = kHeaderSize;
  m.question.name = decode_name(wire, pos);
  if (pos + 4 > wire.size()) throw Truncated("question fields missing");
  m.question.qtype = static_cast<uint16_t>(wire[pos] << 8 | wire[pos + 1]);
  m.question.qclass = static_cast<uint16_t>(wire[pos + 2] << 8 | wire[pos + 3]);
  pos += 4;

  for (uint16_t i = 0; i < ancount; ++i) {
    ResourceRecord rr;
    rr.name = decode_name(wire, pos);
    if (pos + 10 > wire.size()) throw Truncated("record fields missing");
    ByteReader fields(wire.subspan(pos, 10));
    rr.rtype = fields.u16();
    rr.rclass = fields.u16();
    rr.ttl = fields.u32();
    uint16_t rdlength = fields.u16();
    pos += 10;
    if (pos + rdlength > wire.size()) throw Truncated("rdata missing");
    rr.rdata.assign(wire.begin() + pos, wire.begin() + pos + rdlength);
    pos += rdlength;
    check_a_rdata(rr);
    m.answers.push_back(std::move(rr));
  }

  if (pos != wire.size()) throw Malformed("trailing bytes after last record");
  if (!m.is_response && (!m.answers.empty() || m.rcode != 0)) {
    throw Malformed("query with answers or nonzero rcode");
  }
  return m;
}

Message make_a_response(const Message& query,
                        const std::vector<std::array<uint8_t, 4>>& addrs,
                        uint32_t ttl) {
  Message r;
  r.txid = query.txid;
  r.is_response = true;
  r.question = query.question;
  if (addrs.empty()) {
    r.rcode = kRcodeNxDomain;
    return r;
  }
  r.rcode = kRcodeNoError;
  for (const auto& addr : addrs) {
    ResourceRecord rr;
    rr.name = query.question.name;
    rr.rtype = kTypeA;
    rr.rclass = kClassIn;
    rr.ttl = ttl;
    rr.rdata.assign(addr.begin(), addr.end());
    r.answers.push_back(std::move(rr));
  }
  return r;
}

Message make_error_response(const Message& query, uint8_t rcode) {
  Message r;
  r.txid = query.txid;
  r.is_response = true;
  r.question = query.question;
  r.rcode = rcode;
  return r;
}

std::string format_ipv4(const std::array<uint8_t, 4>& addr) {
  std::string out;
  for (int i = 0; i < 4; ++i) {
    if (i > 0) out.push_back('.');
    out += std::to_string(addr[i]);
  }
  return out;
}

std::array<uint8_t, 4> parse_ipv4(std::string_view text) {
  std::array<uint8_t, 4> out{};
  size_t start = 0;
  for (int i = 0; i < 4; ++i) {
    size_t dot = text.find('.', start);
    bool last = (i == 3);
    if (last != (dot == std::string_view::npos)) {
      throw Malformed("dotted quad needs exactly four octets");
    }
    std::string_view part = text.substr(start, last ? text.size() - start : dot - start);
    if (part.empty() || part.size() > 3) throw Malformed("bad IPv4 octet");
    unsigned value = 0;
    for (char c : part) {
      if (c < '0' || c > '9') throw Malformed("bad IPv4 octet");
      value = value * 10 + static_cast<unsigned>(c - '0');
    }
    if (value > 255) throw Malformed("IPv4 octet out of range");
    out[i] = static_cast<uint8_t>(value);
    start = dot + 1;
  }
  return out;
}

}  // namespace odoq::dns
