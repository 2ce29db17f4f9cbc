// Copyright 2026 The wsprivdb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wsprivdb/hmac.hpp"

#include <openssl/core_names.h>
#include <openssl/evp.h>
#include <openssl/rand.h>

#include <memory>
#include <stdexcept>
#include <string_view>

namespace wsprivdb {

SecretKey::SecretKey(Bytes key_bytes) : key_(std::move(key_bytes)) {
  if (key_.empty()) throw std::invalid_argument("secret key must not be empty");
}

SecretKey SecretKey::random(std::size_t bits) {
  if (bits == 0 || bits % 8 != 0) throw std::invalid_argument("key size must be a positive multiple of 8 bits");
  Bytes key(bits / 8);
  if (RAND_bytes(key.data(), static_cast<int>(key.size())) != 1) throw std::runtime_error("RAND_bytes failed");
  return SecretKey(std::move(key));
}

struct HmacSha256::Impl {
  EVP_MAC* mac = nullptr;
  EVP_MAC_CTX* ctx = nullptr;

  ~Impl() {
    EVP_MAC_CTX_free(ctx);
    EVP_MAC_free(mac);
  }
};

HmacSha256::HmacSha256(const SecretKey& key) : impl_(std::make_unique<Impl>()) {
  impl_->mac = EVP_MAC_fetch(nullptr, "HMAC", nullptr);
  if (impl_->mac == nullptr) throw std::runtime_error("HMAC unavailable in libcrypto");
  impl_->ctx = EVP_MAC_CTX_new(impl_->mac);
  if (impl_->ctx == nullptr) throw std::runtime_error("EVP_MAC_CTX_new failed");

  char digest[] = "SHA256";
  OSSL_PARAM params[] = {
      OSSL_PARAM_construct_utf8_string(OSSL_MAC_PARAM_DIGEST, digest, 0),
      OSSL_PARAM_construct_end(),
  };
  const ByteView k = key.bytes();
  if (EVP_MAC_init(impl_->ctx, k.data(), k.size(), params) != 1) throw std::runtime_error("EVP_MAC_init failed");
}

HmacSha256::~HmacSha256() = default;
HmacSha256::HmacSha256(HmacSha256&&) noexcept = default;
HmacSha256& HmacSha256::operator=(HmacSha256&&) noexcept = default;

Mac HmacSha256::mac(ByteView message) {
  // Each call works on a copy of the keyed context. Re-initialising with a
  // null key does not reset the inner state on OpenSSL 3.0.2.
  std::unique_ptr<EVP_MAC_CTX, decltype(&EVP_MAC_CTX_free)> ctx(EVP_MAC_CTX_dup(impl_->ctx), &EVP_MAC_CTX_free);
  if (!ctx || EVP_MAC_update(ctx.get(), message.data(), message.size()) != 1) {
    throw std::runtime_error("HMAC update failed");
  }
  Mac out{};
  std::size_t written = 0;
  if (EVP_MAC_final(ctx.get(), out.data(), &written, out.size()) != 1 || written != out.size()) {
    throw std::runtime_error("HMAC final failed");
  }
  return out;
}

Mac hmac_sha256(ByteView key, ByteView message) {
  HmacSha256 h(SecretKey(Bytes(key.begin(), key.end())));
  return h.mac(message);
}

SecretKey DeterministicKeySource::next(std::size_t bits) {
  if (bits == 0 || bits % 8 != 0) throw std::invalid_argument("key size must be a positive multiple of 8 bits");
  const Bytes seed = to_bytes(seed_);
  HmacSha256 prf{SecretKey(seed)};
  const std::uint64_t index = counter_++;

  Bytes key;
  key.reserve(bits / 8);
  for (std::uint32_t block = 0; key.size() < bits / 8; ++block) {
    constexpr std::string_view label = "wsprivdb-key";
    ByteWriter msg;
    msg.bytes(ByteView(reinterpret_cast<const std::uint8_t*>(label.data()), label.size())).u64(index).u32(block);
    const Mac out = prf.mac(msg.view());
    const std::size_t take = std::min(out.size(), bits / 8 - key.size());
    key.insert(key.end(), out.begin(), out.begin() + static_cast<std::ptrdiff_t>(take));
  }
  return SecretKey(std::move(key));
}

}  // namespace wsprivdb
