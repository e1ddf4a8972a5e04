#include "odoq/seal.hpp"

namespace odoq::seal {

namespace {

// AAD domain separation between the two sealing directions.
constexpr uint8_t kRequestAadPrefix = 0x01;
constexpr uint8_t kResponseAad = 0x02;

constexpr std::string_view kResponseNonceInfo = "odoq response";

void require_supported(uint16_t kem_id, uint16_t kdf_id, uint16_t aead_id) {
  if (!hpke::suite_supported(kem_id, kdf_id, aead_id)) {
    throw UnsupportedSuite("unsupported HPKE suite");
  }
}

Bytes request_body(ByteView query_wire, const SessionSecrets& secrets) {
  if (query_wire.size() > 0xffff) throw Malformed("query wire too long");
  ByteWriter w;
  w.u8(static_cast<uint8_t>(secrets.sym_key.size()));
  w.raw(secrets.sym_key);
  w.u8(static_cast<uint8_t>(secrets.nonce.size()));
  w.raw(ByteView(secrets.nonce));
  w.u16(static_cast<uint16_t>(query_wire.size()));
  w.raw(query_wire);
  return w.take();
}

// Each sym_key seals at most one logical response, so a nonce derived from
// the session values keeps sealing deterministic.
Bytes response_nonce(const SessionSecrets& secrets) {
  Bytes prk = hpke::hkdf_extract(ByteView(secrets.nonce), secrets.sym_key);
  return hpke::hkdf_expand(prk, to_bytes(kResponseNonceInfo), hpke::kAeadNonceSize);
}

}  // namespace

SessionSecrets SessionSecrets::generate(RandomSource& rng) {
  SessionSecrets s;
  s.sym_key.resize(kSymKeySize);
  rng.fill(s.sym_key);
  rng.fill(s.nonce);
  return s;
}

ResolverKeyPair generate_keypair(const Suite& suite, uint8_t key_id,
                                 RandomSource& rng) {
  require_supported(suite.kem_id, suite.kdf_id, suite.aead_id);
  Bytes ikm(32);
  rng.fill(ikm);
  hpke::KeyPair kp = hpke::derive_keypair(ikm);
  ResolverKeyPair out;
  out.config.key_id = key_id;
  out.config.kem_id = suite.kem_id;
  out.config.kdf_id = suite.kdf_id;
  out.config.aead_id = suite.aead_id;
  out.config.public_key = std::move(kp.public_key);
  out.private_key = std::move(kp.secret_key);
  return out;
}

SealedRequest seal_request(const KeyConfig& config, ByteView query_wire,
                           const SessionSecrets& secrets, RandomSource& rng) {
  Bytes ikm_e(32);
  rng.fill(ikm_e);
  return seal_request_with_ikm(config, query_wire, secrets, ikm_e);
}

SealedRequest seal_request_with_ikm(const KeyConfig& config, ByteView query_wire,
                                    const SessionSecrets& secrets,
                                    ByteView ikm_e) {
  require_supported(config.kem_id, config.kdf_id, config.aead_id);
  if (config.public_key.size() != hpke::kPublicKeySize) {
    throw UnsupportedSuite("public key size does not match the KEM");
  }
  if (secrets.sym_key.size() != kSymKeySize) {
    throw UnsupportedSuite("sym_key size does not match the AEAD");
  }
  Bytes body = request_body(query_wire, secrets);
  const uint8_t aad[2] = {kRequestAadPrefix, config.key_id};
  hpke::Sealed sealed = hpke::seal_base(config.public_key, {}, aad, body, ikm_e);
  SealedRequest out;
  out.key_id = config.key_id;
  out.enc = std::move(sealed.enc);
  out.ciphertext = std::move(sealed.ciphertext);
  return out;
}

OpenedRequest open_request(const ResolverKeyPair& keypair,
                           const SealedRequest& request) {
  if (request.key_id != keypair.config.key_id) {
    throw DecryptFailure("decryption failed");
  }
  const uint8_t aad[2] = {kRequestAadPrefix, request.key_id};
  Bytes body = hpke::open_base(keypair.private_key, request.enc, {}, aad,
                               request.ciphertext);
  ByteReader r{body};
  OpenedRequest out;
  try {
    uint8_t key_len = r.u8();
    if (key_len != kSymKeySize) throw MalformedBody("bad sym_key length");
    ByteView key = r.raw(key_len);
    out.secrets.sym_key.assign(key.begin(), key.end());
    uint8_t nonce_len = r.u8();
    if (nonce_len != kNonceSize) throw MalformedBody("bad nonce length");
    ByteView nonce = r.raw(nonce_len);
    std::copy(nonce.begin(), nonce.end(), out.secrets.nonce.begin());
    uint16_t dns_len = r.u16();
    ByteView wire = r.raw(dns_len);
    out.query_wire.assign(wire.begin(), wire.end());
  } catch (const Truncated&) {
    throw MalformedBody("request body too short");
  }
  if (!r.done()) throw MalformedBody("trailing bytes in request body");
  return out;
}

SealedResponse seal_response(const SessionSecrets& secrets,
                             ByteView response_wire, const dns::Name& domain) {
  if (response_wire.size() > 0xffff) throw Malformed("response wire too long");
  std::string presentation = domain.to_string();
  if (presentation.size() > 0xff) throw Malformed("domain too long");
  ByteWriter w;
  w.u8(static_cast<uint8_t>(secrets.nonce.size()));
  w.raw(ByteView(secrets.nonce));
  w.u8(static_cast<uint8_t>(presentation.size()));
  w.raw(presentation);
  w.u16(static_cast<uint16_t>(response_wire.size()));
  w.raw(response_wire);
  Bytes body = w.take();
  const uint8_t aad[1] = {kResponseAad};
  SealedResponse out;
  out.ciphertext =
      hpke::aead_seal(secrets.sym_key, response_nonce(secrets), aad, body);
  return out;
}

OpenedResponse open_response(const SessionSecrets& secrets,
                             const SealedResponse& response) {
  const uint8_t aad[1] = {kResponseAad};
  Bytes body = hpke::aead_open(secrets.sym_key, response_nonce(secrets), aad,
                               response.ciphertext);
  ByteReader r{body};
  OpenedResponse out;
  try {
    uint8_t nonce_len = r.u8();
    if (nonce_len != kNonceSize) throw MalformedBody("bad nonce length");
    ByteView nonce = r.raw(nonce_len);
    std::copy(nonce.begin(), nonce.end(), out.nonce.begin());
    uint8_t domain_len = r.u8();
    ByteView domain = r.raw(domain_len);
    out.domain.assign(domain.begin(), domain.end());
    uint16_t dns_len = r.u16();
    ByteView wire = r.raw(dns_len);
    out.response_wire.assign(wire.begin(), wire.end());
  } catch (const Truncated&) {
    throw MalformedBody("response body too short");
  }
  if (!r.done()) throw MalformedBody("trailing bytes in response body");
  return out;
}

Bytes encode_key_config(const KeyConfig& config) {
  if (config.public_key.size() > 0xffff) throw Malformed("public key too long");
  ByteWriter w;
  w.u8(config.key_id);
  w.u16(config.kem_id);
  w.u16(config.kdf_id);
  w.u16(config.aead_id);
  w.u16(static_cast<uint16_t>(config.public_key.size()));
  w.raw(config.public_key);
  return w.take();
}

KeyConfig decode_key_config(ByteView wire) {
  ByteReader r{wire};
  KeyConfig c;
  c.key_id = r.u8();
  c.kem_id = r.u16();
  c.kdf_id = r.u16();
  c.aead_id = r.u16();
  uint16_t pk_len = r.u16();
  ByteView pk = r.raw(pk_len);
  c.public_key.assign(pk.begin(), pk.end());
  if (!r.done()) throw Malformed("trailing bytes after key config");
  require_supported(c.kem_id, c.kdf_id, c.aead_id);
  if (c.public_key.size() != hpke::kPublicKeySize) {
    throw UnsupportedSuite("public key size does not match the KEM");
  }
  return c;
}

Bytes encode_sealed_request(const SealedRequest& request) {
  if (request.enc.size() > 0xffff) throw Malformed("encapsulated key too long");
  ByteWriter w;
  w.u8(request.key_id);
  w.u16(static_cast<uint16_t>(request.enc.size()));
  w.raw(request.enc);
  w.u32(static_cast<uint32_t>(request.ciphertext.size()));
  w.raw(request.ciphertext);
  return w.take();
}

SealedRequest decode_sealed_request(ByteView wire) {
  ByteReader r{wire};
  SealedRequest q;
  q.key_id = r.u8();
  uint16_t enc_len = r.u16();
  ByteView enc = r.raw(enc_len);
  q.enc.assign(enc.begin(), enc.end());
  uint32_t ct_len = r.u32();
  ByteView ct = r.raw(ct_len);
  q.ciphertext.assign(ct.begin(), ct.end());
  if (!r.done()) throw Malformed("trailing bytes after sealed request");
  return q;
}

}  // namespace odoq::seal
