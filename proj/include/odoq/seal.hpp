#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "odoq/bytes.hpp"
#include "odoq/dns.hpp"
#include "odoq/hpke.hpp"
#include "odoq/random.hpp"

// The protocol's two sealing directions. Requests are HPKE-sealed to the
// resolver's public key and carry the client's symmetric key and nonce;
// responses come back under that symmetric key with the domain and nonce
// bound inside.
//
// Wire layouts (big-endian):
//   KeyConfig:      key_id u8 | kem_id u16 | kdf_id u16 | aead_id u16 |
//                   pk_len u16 | pk
//   SealedRequest:  key_id u8 | enc_len u16 | enc | ct_len u32 | ct
//   request body:   sym_key_len u8 | sym_key | nonce_len u8 | nonce |
//                   dns_len u16 | dns query wire
//   response body:  nonce_len u8 | nonce | domain_len u8 | domain (ASCII,
//                   dot-separated, no trailing dot) | dns_len u16 |
//                   dns response wire

namespace odoq::seal {

using hpke::DecryptFailure;
using hpke::UnsupportedSuite;

// Plaintext recovered after a successful AEAD open, but laid out wrong.
class MalformedBody : public Error {
 public:
  using Error::Error;
};

inline constexpr size_t kSymKeySize = hpke::kAeadKeySize;
inline constexpr size_t kNonceSize = 16;

struct Suite {
  uint16_t kem_id = hpke::kKemX25519HkdfSha256;
  uint16_t kdf_id = hpke::kKdfHkdfSha256;
  uint16_t aead_id = hpke::kAeadAes128Gcm;
};

struct KeyConfig {
  uint8_t key_id = 0;
  uint16_t kem_id = hpke::kKemX25519HkdfSha256;
  uint16_t kdf_id = hpke::kKdfHkdfSha256;
  uint16_t aead_id = hpke::kAeadAes128Gcm;
  Bytes public_key;
  bool operator==(const KeyConfig&) const = default;
};

struct ResolverKeyPair {
  KeyConfig config;
  Bytes private_key;
};

struct SessionSecrets {
  Bytes sym_key;                        // AEAD key size
  std::array<uint8_t, kNonceSize> nonce{};
  static SessionSecrets generate(RandomSource& rng);
  bool operator==(const SessionSecrets&) const = default;
};

struct SealedRequest {
  uint8_t key_id = 0;
  Bytes enc;
  Bytes ciphertext;
  bool operator==(const SealedRequest&) const = default;
};

struct SealedResponse {
  Bytes ciphertext;
  bool operator==(const SealedResponse&) const = default;
};

ResolverKeyPair generate_keypair(const Suite& suite, uint8_t key_id,
                                 RandomSource& rng);

SealedRequest seal_request(const KeyConfig& config, ByteView query_wire,
                           const SessionSecrets& secrets, RandomSource& rng);
// Deterministic variant: the HPKE ephemeral key comes from `ikm_e`.
SealedRequest seal_request_with_ikm(const KeyConfig& config, ByteView query_wire,
                                    const SessionSecrets& secrets,
                                    ByteView ikm_e);

struct OpenedRequest {
  Bytes query_wire;
  SessionSecrets secrets;
};
OpenedRequest open_request(const ResolverKeyPair& keypair,
                           const SealedRequest& request);

SealedResponse seal_response(const SessionSecrets& secrets,
                             ByteView response_wire, const dns::Name& domain);

struct OpenedResponse {
  Bytes response_wire;
  std::string domain;
  std::array<uint8_t, kNonceSize> nonce{};
};
OpenedResponse open_response(const SessionSecrets& secrets,
                             const SealedResponse& response);

Bytes encode_key_config(const KeyConfig& config);
KeyConfig decode_key_config(ByteView wire);

Bytes encode_sealed_request(const SealedRequest& request);
SealedRequest decode_sealed_request(ByteView wire);

}  // namespace odoq::seal
