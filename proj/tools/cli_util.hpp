#pragma once

// Shared plumbing for the operator binaries: key-file persistence, the
// --key argument forms, and a tiny stderr logger.

#include <sys/stat.h>

#include <atomic>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "odoq/bytes.hpp"
#include "odoq/hpke.hpp"
#include "odoq/seal.hpp"

namespace odoq::cli {

inline void log_line(const std::string& line) {
  std::fprintf(stderr, "%s\n", line.c_str());
  std::fflush(stderr);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline std::string first_line(const std::string& text) {
  size_t end = text.find('\n');
  return end == std::string::npos ? text : text.substr(0, end);
}

// Key file: one line, base64(key-config encoding || raw private key).
inline std::string encode_keypair_line(const seal::ResolverKeyPair& kp) {
  Bytes raw = seal::encode_key_config(kp.config);
  raw.insert(raw.end(), kp.private_key.begin(), kp.private_key.end());
  return base64_encode(raw);
}

inline seal::ResolverKeyPair decode_keypair_line(const std::string& line) {
  Bytes raw = base64_decode(line);
  if (raw.size() < 9) throw Malformed("key file too short");
  size_t pk_len = static_cast<size_t>(raw[7]) << 8 | raw[8];
  size_t config_len = 9 + pk_len;
  if (raw.size() < config_len) throw Malformed("key file truncated");
  seal::ResolverKeyPair kp;
  kp.config = seal::decode_key_config(ByteView(raw).subspan(0, config_len));
  kp.private_key.assign(raw.begin() + static_cast<long>(config_len), raw.end());
  if (kp.private_key.size() != hpke::kSecretKeySize) {
    throw Malformed("key file holds a bad private key");
  }
  if (hpke::public_from_secret(kp.private_key) != kp.config.public_key) {
    throw Malformed("key file private key does not match its public key");
  }
  return kp;
}

inline void save_keypair(const std::string& path, const seal::ResolverKeyPair& kp) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out << encode_keypair_line(kp) << "\n";
  out.close();
  ::chmod(path.c_str(), 0600);
}

inline seal::ResolverKeyPair load_or_create_keypair(const std::string& path,
                                                    RandomSource& rng) {
  std::ifstream probe(path);
  if (probe) {
    std::string line;
    std::getline(probe, line);
    return decode_keypair_line(line);
  }
  seal::ResolverKeyPair kp = seal::generate_keypair({}, 1, rng);
  save_keypair(path, kp);
  return kp;
}

// "--key <base64|@path>"
inline seal::KeyConfig parse_key_argument(const std::string& arg) {
  std::string text = arg;
  if (!arg.empty() && arg.front() == '@') {
    text = first_line(read_text_file(arg.substr(1)));
  }
  return seal::decode_key_config(base64_decode(text));
}

}  // namespace odoq::cli
