#include "fracslip/hash.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>

#include "fracslip/error.hpp"

namespace fracslip {

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::IoError, "SHA-256 digest failed");
  }
  std::string out;
  out.reserve(2 * len);
  char buf[3];
  for (unsigned int k = 0; k < len; ++k) {
    std::snprintf(buf, sizeof buf, "%02x", md[k]);
    out += buf;
  }
  return out;
}

}  // namespace fracslip
