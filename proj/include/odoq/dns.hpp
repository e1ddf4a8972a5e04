#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "odoq/bytes.hpp"
#include "odoq/errors.hpp"

// Minimal RFC 1035 message subset: one question, A answers, big-endian
// fields throughout.
//
//   Header (12 bytes)
//   +--+--+--+--+--+--+--+--+--+--+--+--+--+--+--+--+
//   |                      ID                       |
//   +--+--+--+--+--+--+--+--+--+--+--+--+--+--+--+--+
//   |QR|   OPCODE  |AA|TC|RD|RA|   Z    |   RCODE   |
//   +--+--+--+--+--+--+--+--+--+--+--+--+--+--+--+--+
//   |        QDCOUNT        |        ANCOUNT        |
//   +--+--+--+--+--+--+--+--+--+--+--+--+--+--+--+--+
//   |        NSCOUNT        |        ARCOUNT        |
//   +--+--+--+--+--+--+--+--+--+--+--+--+--+--+--+--+
//
// Names are encoded as length-prefixed labels ending in a zero octet; the
// encoder never emits compression pointers, the decoder accepts pointers
// that target earlier offsets only.

namespace odoq::dns {

class InvalidName : public Error {
 public:
  using Error::Error;
};

// Compression pointer targeting the current or a later offset, or a pointer
// running outside the message.
class BadPointer : public Error {
 public:
  using Error::Error;
};

inline constexpr uint16_t kTypeA = 1;
inline constexpr uint16_t kClassIn = 1;

inline constexpr uint8_t kRcodeNoError = 0;
inline constexpr uint8_t kRcodeServFail = 2;
inline constexpr uint8_t kRcodeNxDomain = 3;
inline constexpr uint8_t kRcodeNotImp = 4;

// A domain name as an ordered list of labels, case-preserving. Labels are
// 1..63 bytes each and the full encoding fits in 255 bytes.
class Name {
 public:
  Name() = default;
  explicit Name(std::vector<std::string> labels);

  // "example.com" (one trailing dot tolerated).
  static Name parse(std::string_view presentation);

  const std::vector<std::string>& labels() const { return labels_; }
  // Presentation form: dot-separated, no trailing dot.
  std::string to_string() const;
  std::string lowered() const;
  // Labels + length octets + terminal zero.
  size_t encoded_size() const;
  bool equals_ci(const Name& other) const;
  bool operator==(const Name& other) const = default;

 private:
  void validate() const;
  std::vector<std::string> labels_;
};

struct Question {
  Name name;
  uint16_t qtype = kTypeA;
  uint16_t qclass = kClassIn;
  bool operator==(const Question&) const = default;
};

struct ResourceRecord {
  Name name;
  uint16_t rtype = kTypeA;
  uint16_t rclass = kClassIn;
  uint32_t ttl = 0;
  Bytes rdata;
  bool operator==(const ResourceRecord&) const = default;
};

struct Message {
  uint16_t txid = 0;
  bool is_response = false;
  uint8_t rcode = kRcodeNoError;  // low 4 bits only
  Question question;
  std::vector<ResourceRecord> answers;
  bool operator==(const Message&) const = default;
};

Message make_query(const Name& name, uint16_t qtype, uint16_t txid);

Bytes encode_message(const Message& msg);
Message decode_message(ByteView wire);

// Response mirroring the query's txid and question. Empty `addrs` yields
// NXDOMAIN with no answers.
Message make_a_response(const Message& query,
                        const std::vector<std::array<uint8_t, 4>>& addrs,
                        uint32_t ttl = 300);

// Answerless response with the given rcode (SERVFAIL, NOTIMP).
Message make_error_response(const Message& query, uint8_t rcode);

std::string format_ipv4(const std::array<uint8_t, 4>& addr);
std::array<uint8_t, 4> parse_ipv4(std::string_view text);

}  // namespace odoq::dns
