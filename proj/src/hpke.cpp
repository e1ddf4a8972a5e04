#include "odoq/hpke.hpp"

#include <openssl/core_names.h>
#include <openssl/evp.h>

#include <memory>

namespace odoq::hpke {

namespace {

struct PkeyDeleter {
  void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); }
};
struct PkeyCtxDeleter {
  void operator()(EVP_PKEY_CTX* p) const { EVP_PKEY_CTX_free(p); }
};
struct CipherCtxDeleter {
  void operator()(EVP_CIPHER_CTX* p) const { EVP_CIPHER_CTX_free(p); }
};
struct MacDeleter {
  void operator()(EVP_MAC* p) const { EVP_MAC_free(p); }
};
struct MacCtxDeleter {
  void operator()(EVP_MAC_CTX* p) const { EVP_MAC_CTX_free(p); }
};

using PkeyPtr = std::unique_ptr<EVP_PKEY, PkeyDeleter>;
using PkeyCtxPtr = std::unique_ptr<EVP_PKEY_CTX, PkeyCtxDeleter>;
using CipherCtxPtr = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter>;

Bytes hmac_sha256(ByteView key, ByteView data) {
  static EVP_MAC* mac = EVP_MAC_fetch(nullptr, "HMAC", nullptr);
  if (mac == nullptr) throw Error("HMAC unavailable");
  std::unique_ptr<EVP_MAC_CTX, MacCtxDeleter> ctx(EVP_MAC_CTX_new(mac));
  if (!ctx) throw Error("HMAC context allocation failed");
  char digest[] = "SHA256";
  OSSL_PARAM params[] = {
      OSSL_PARAM_construct_utf8_string(OSSL_MAC_PARAM_DIGEST, digest, 0),
      OSSL_PARAM_construct_end()};
  // HMAC with an empty key still needs a non-null pointer.
  static const uint8_t kEmpty = 0;
  const uint8_t* key_ptr = key.empty() ? &kEmpty : key.data();
  if (EVP_MAC_init(ctx.get(), key_ptr, key.size(), params) != 1 ||
      EVP_MAC_update(ctx.get(), data.data(), data.size()) != 1) {
    throw Error("HMAC failed");
  }
  Bytes out(32);
  size_t out_len = 0;
  if (EVP_MAC_final(ctx.get(), out.data(), &out_len, out.size()) != 1 ||
      out_len != 32) {
    throw Error("HMAC failed");
  }
  return out;
}

// suite_id prefixes per RFC 9180 §4.
Bytes kem_suite_id() {
  ByteWriter w;
  w.raw(std::string_view("KEM"));
  w.u16(kKemX25519HkdfSha256);
  return w.take();
}

Bytes hpke_suite_id() {
  ByteWriter w;
  w.raw(std::string_view("HPKE"));
  w.u16(kKemX25519HkdfSha256);
  w.u16(kKdfHkdfSha256);
  w.u16(kAeadAes128Gcm);
  return w.take();
}

Bytes labeled_extract(ByteView salt, std::string_view label, ByteView ikm,
                      const Bytes& suite_id) {
  ByteWriter w;
  w.raw(std::string_view("HPKE-v1"));
  w.raw(suite_id);
  w.raw(label);
  w.raw(ikm);
  Bytes labeled = w.take();
  return hkdf_extract(salt, labeled);
}

Bytes labeled_expand(ByteView prk, std::string_view label, ByteView info,
                     size_t length, const Bytes& suite_id) {
  ByteWriter w;
  w.u16(static_cast<uint16_t>(length));
  w.raw(std::string_view("HPKE-v1"));
  w.raw(suite_id);
  w.raw(label);
  w.raw(info);
  Bytes labeled = w.take();
  return hkdf_expand(prk, labeled, length);
}

Bytes x25519(ByteView secret_key, ByteView peer_public) {
  PkeyPtr sk(EVP_PKEY_new_raw_private_key(EVP_PKEY_X25519, nullptr,
                                          secret_key.data(), secret_key.size()));
  PkeyPtr pk(EVP_PKEY_new_raw_public_key(EVP_PKEY_X25519, nullptr,
                                         peer_public.data(), peer_public.size()));
  if (!sk || !pk) throw DecryptFailure("bad X25519 key");
  PkeyCtxPtr ctx(EVP_PKEY_CTX_new(sk.get(), nullptr));
  Bytes out(32);
  size_t out_len = out.size();
  if (!ctx || EVP_PKEY_derive_init(ctx.get()) != 1 ||
      EVP_PKEY_derive_set_peer(ctx.get(), pk.get()) != 1 ||
      EVP_PKEY_derive(ctx.get(), out.data(), &out_len) != 1 || out_len != 32) {
    // Covers the all-zero shared secret OpenSSL rejects.
    throw DecryptFailure("X25519 agreement failed");
  }
  return out;
}

// shared_secret = ExtractAndExpand(dh, enc || pkR)
Bytes kem_shared_secret(ByteView dh, ByteView enc, ByteView recipient_pk) {
  Bytes suite = kem_suite_id();
  Bytes eae_prk = labeled_extract({}, "eae_prk", dh, suite);
  ByteWriter ctx;
  ctx.raw(enc);
  ctx.raw(recipient_pk);
  Bytes kem_context = ctx.take();
  return labeled_expand(eae_prk, "shared_secret", kem_context, 32, suite);
}

struct ScheduleOutput {
  Bytes key;
  Bytes base_nonce;
};

// KeySchedule for mode_base: no PSK.
ScheduleOutput key_schedule_base(ByteView shared_secret, ByteView info) {
  Bytes suite = hpke_suite_id();
  Bytes psk_id_hash = labeled_extract({}, "psk_id_hash", {}, suite);
  Bytes info_hash = labeled_extract({}, "info_hash", info, suite);
  ByteWriter w;
  w.u8(0x00);  // mode_base
  w.raw(psk_id_hash);
  w.raw(info_hash);
  Bytes context = w.take();
  Bytes secret = labeled_extract(shared_secret, "secret", {}, suite);
  ScheduleOutput out;
  out.key = labeled_expand(secret, "key", context, kAeadKeySize, suite);
  out.base_nonce = labeled_expand(secret, "base_nonce", context, kAeadNonceSize, suite);
  return out;
}

}  // namespace

bool suite_supported(uint16_t kem_id, uint16_t kdf_id, uint16_t aead_id) {
  return kem_id == kKemX25519HkdfSha256 && kdf_id == kKdfHkdfSha256 &&
         aead_id == kAeadAes128Gcm;
}

Bytes hkdf_extract(ByteView salt, ByteView ikm) {
  // RFC 5869: an absent salt means a hash-length zero string. HMAC zero-pads
  // short keys to the block size, so the empty salt already keys identically.
  return hmac_sha256(salt, ikm);
}

Bytes hkdf_expand(ByteView prk, ByteView info, size_t length) {
  if (length > 255 * 32) throw Error("HKDF output too long");
  Bytes out;
  out.reserve(length);
  Bytes t;
  uint8_t counter = 1;
  while (out.size() < length) {
    ByteWriter w;
    w.raw(t);
    w.raw(info);
    w.u8(counter++);
    Bytes block = w.take();
    t = hmac_sha256(prk, block);
    size_t need = std::min(t.size(), length - out.size());
    out.insert(out.end(), t.begin(), t.begin() + need);
  }
  return out;
}

KeyPair derive_keypair(ByteView ikm) {
  if (ikm.size() != 32) throw Error("keypair ikm must be 32 bytes");
  Bytes suite = kem_suite_id();
  Bytes dkp_prk = labeled_extract({}, "dkp_prk", ikm, suite);
  KeyPair kp;
  kp.secret_key = labeled_expand(dkp_prk, "sk", {}, kSecretKeySize, suite);
  kp.public_key = public_from_secret(kp.secret_key);
  return kp;
}

Bytes public_from_secret(ByteView secret_key) {
  PkeyPtr sk(EVP_PKEY_new_raw_private_key(EVP_PKEY_X25519, nullptr,
                                          secret_key.data(), secret_key.size()));
  if (!sk) throw Error("bad X25519 secret key");
  Bytes pk(kPublicKeySize);
  size_t len = pk.size();
  if (EVP_PKEY_get_raw_public_key(sk.get(), pk.data(), &len) != 1 ||
      len != kPublicKeySize) {
    throw Error("X25519 public key derivation failed");
  }
  return pk;
}

Bytes aead_seal(ByteView key, ByteView nonce, ByteView aad, ByteView plaintext) {
  if (key.size() != kAeadKeySize || nonce.size() != kAeadNonceSize) {
    throw Error("bad AEAD key or nonce size");
  }
  CipherCtxPtr ctx(EVP_CIPHER_CTX_new());
  if (!ctx) throw Error("cipher context allocation failed");
  Bytes out(plaintext.size() + kAeadTagSize);
  int len = 0;
  if (EVP_EncryptInit_ex(ctx.get(), EVP_aes_128_gcm(), nullptr, key.data(),
                         nonce.data()) != 1) {
    throw Error("AES-GCM init failed");
  }
  if (!aad.empty() &&
      EVP_EncryptUpdate(ctx.get(), nullptr, &len, aad.data(),
                        static_cast<int>(aad.size())) != 1) {
    throw Error("AES-GCM aad failed");
  }
  int ct_len = 0;
  if (!plaintext.empty() &&
      EVP_EncryptUpdate(ctx.get(), out.data(), &ct_len, plaintext.data(),
                        static_cast<int>(plaintext.size())) != 1) {
    throw Error("AES-GCM encrypt failed");
  }
  int final_len = 0;
  if (EVP_EncryptFinal_ex(ctx.get(), out.data() + ct_len, &final_len) != 1) {
    throw Error("AES-GCM finalize failed");
  }
  ct_len += final_len;
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kAeadTagSize,
                          out.data() + ct_len) != 1) {
    throw Error("AES-GCM tag failed");
  }
  out.resize(static_cast<size_t>(ct_len) + kAeadTagSize);
  return out;
}

Bytes aead_open(ByteView key, ByteView nonce, ByteView aad, ByteView ciphertext) {
  if (key.size() != kAeadKeySize || nonce.size() != kAeadNonceSize) {
    throw Error("bad AEAD key or nonce size");
  }
  if (ciphertext.size() < kAeadTagSize) throw DecryptFailure("ciphertext shorter than tag");
  size_t body_len = ciphertext.size() - kAeadTagSize;
  CipherCtxPtr ctx(EVP_CIPHER_CTX_new());
  if (!ctx) throw Error("cipher context allocation failed");
  if (EVP_DecryptInit_ex(ctx.get(), EVP_aes_128_gcm(), nullptr, key.data(),
                         nonce.data()) != 1) {
    throw Error("AES-GCM init failed");
  }
  int len = 0;
  if (!aad.empty() &&
      EVP_DecryptUpdate(ctx.get(), nullptr, &len, aad.data(),
                        static_cast<int>(aad.size())) != 1) {
    throw Error("AES-GCM aad failed");
  }
  Bytes out(body_len);
  int pt_len = 0;
  if (body_len > 0 &&
      EVP_DecryptUpdate(ctx.get(), out.data(), &pt_len, ciphertext.data(),
                        static_cast<int>(body_len)) != 1) {
    throw DecryptFailure("decryption failed");
  }
  Bytes tag(ciphertext.end() - kAeadTagSize, ciphertext.end());
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kAeadTagSize,
                          tag.data()) != 1) {
    throw Error("AES-GCM tag failed");
  }
  int final_len = 0;
  if (EVP_DecryptFinal_ex(ctx.get(), out.data() + pt_len, &final_len) != 1) {
    throw DecryptFailure("decryption failed");
  }
  out.resize(static_cast<size_t>(pt_len) + static_cast<size_t>(final_len));
  return out;
}

Sealed seal_base(ByteView recipient_pk, ByteView info, ByteView aad,
                 ByteView plaintext, ByteView ikm_e) {
  if (recipient_pk.size() != kPublicKeySize) {
    throw UnsupportedSuite("recipient public key must be 32 bytes");
  }
  KeyPair eph = derive_keypair(ikm_e);
  Bytes dh = x25519(eph.secret_key, recipient_pk);
  Bytes shared = kem_shared_secret(dh, eph.public_key, recipient_pk);
  ScheduleOutput sched = key_schedule_base(shared, info);
  Sealed out;
  out.enc = std::move(eph.public_key);
  out.ciphertext = aead_seal(sched.key, sched.base_nonce, aad, plaintext);
  return out;
}

Bytes open_base(ByteView recipient_sk, ByteView enc, ByteView info,
                ByteView aad, ByteView ciphertext) {
  if (enc.size() != kPublicKeySize) throw DecryptFailure("bad encapsulated key size");
  Bytes dh = x25519(recipient_sk, enc);
  Bytes recipient_pk = public_from_secret(recipient_sk);
  Bytes shared = kem_shared_secret(dh, enc, recipient_pk);
  ScheduleOutput sched = key_schedule_base(shared, info);
  return aead_open(sched.key, sched.base_nonce, aad, ciphertext);
}

}  // namespace odoq::hpke
