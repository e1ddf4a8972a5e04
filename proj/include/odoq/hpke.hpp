#pragma once

#include <cstdint>

#include "odoq/bytes.hpp"
#include "odoq/errors.hpp"

// HPKE base mode (RFC 9180) for the one suite this project speaks:
// DHKEM(X25519, HKDF-SHA256) / HKDF-SHA256 / AES-128-GCM.

namespace odoq::hpke {

class UnsupportedSuite : public Error {
 public:
  using Error::Error;
};

// Single opaque failure for every decryption problem: wrong key, wrong key
// id, tag mismatch. Callers cannot distinguish the causes.
class DecryptFailure : public Error {
 public:
  using Error::Error;
};

inline constexpr uint16_t kKemX25519HkdfSha256 = 0x0020;
inline constexpr uint16_t kKdfHkdfSha256 = 0x0001;
inline constexpr uint16_t kAeadAes128Gcm = 0x0001;

inline constexpr size_t kPublicKeySize = 32;   // Npk = Nenc
inline constexpr size_t kSecretKeySize = 32;   // Nsk
inline constexpr size_t kAeadKeySize = 16;     // Nk
inline constexpr size_t kAeadNonceSize = 12;   // Nn
inline constexpr size_t kAeadTagSize = 16;     // Nt

bool suite_supported(uint16_t kem_id, uint16_t kdf_id, uint16_t aead_id);

Bytes hkdf_extract(ByteView salt, ByteView ikm);
Bytes hkdf_expand(ByteView prk, ByteView info, size_t length);

struct KeyPair {
  Bytes secret_key;
  Bytes public_key;
};

// RFC 9180 DeriveKeyPair for the X25519 KEM; ikm must be 32 bytes.
KeyPair derive_keypair(ByteView ikm);
Bytes public_from_secret(ByteView secret_key);

// AES-128-GCM with the tag appended to the ciphertext.
Bytes aead_seal(ByteView key, ByteView nonce, ByteView aad, ByteView plaintext);
Bytes aead_open(ByteView key, ByteView nonce, ByteView aad, ByteView ciphertext);

struct Sealed {
  Bytes enc;         // KEM encapsulated key
  Bytes ciphertext;  // AEAD output, tag appended
};

// Single-shot seal to `recipient_pk`; the ephemeral key is derived from
// `ikm_e` so callers control the randomness.
Sealed seal_base(ByteView recipient_pk, ByteView info, ByteView aad,
                 ByteView plaintext, ByteView ikm_e);
Bytes open_base(ByteView recipient_sk, ByteView enc, ByteView info,
                ByteView aad, ByteView ciphertext);

}  // namespace odoq::hpke
