#include "algosim/hash.hpp"

#include <openssl/sha.h>

#include <cstring>

#include "algosim/errors.hpp"

namespace algosim {

bool Hash256::is_zero() const {
  for (auto b : bytes) {
    if (b != 0) return false;
  }
  return true;
}

std::string Hash256::hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  s.reserve(64);
  for (auto b : bytes) {
    s.push_back(kDigits[b >> 4]);
    s.push_back(kDigits[b & 0xf]);
  }
  return s;
}

Hash256 Hash256::from_hex(std::string_view hex) {
  if (hex.size() != 64) throw DecodeError("hash hex must be 64 characters");
  auto nibble = [](char c) -> std::uint8_t {
    if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<std::uint8_t>(c - 'a' + 10);
    if (c >= 'A' && c <= 'F') return static_cast<std::uint8_t>(c - 'A' + 10);
    throw DecodeError("bad hex digit");
  };
  Hash256 h;
  for (std::size_t i = 0; i < 32; ++i) {
    h.bytes[i] = static_cast<std::uint8_t>((nibble(hex[2 * i]) << 4) | nibble(hex[2 * i + 1]));
  }
  return h;
}

std::uint64_t Hash256::top64() const {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < 8; ++i) v = (v << 8) | bytes[i];
  return v;
}

long double Hash256::unit_interval() const {
  return static_cast<long double>(top64()) * 0x1p-64L;
}

std::size_t Hash256Hasher::operator()(const Hash256& h) const noexcept {
  std::size_t v;
  std::memcpy(&v, h.bytes.data() + 8, sizeof v);
  return v;
}

Hash256 hash256(ByteView payload) {
  Hash256 out;
  SHA256(payload.data(), payload.size(), out.bytes.data());
  return out;
}

Hash256 hash256(std::string_view payload) {
  return hash256(ByteView{reinterpret_cast<const std::uint8_t*>(payload.data()), payload.size()});
}

ByteWriter& ByteWriter::u8(std::uint8_t v) {
  out_.push_back(v);
  return *this;
}

ByteWriter& ByteWriter::u32(std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
  return *this;
}

ByteWriter& ByteWriter::u64(std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
  return *this;
}

ByteWriter& ByteWriter::hash(const Hash256& h) {
  out_.insert(out_.end(), h.bytes.begin(), h.bytes.end());
  return *this;
}

ByteWriter& ByteWriter::blob(ByteView b) {
  u32(static_cast<std::uint32_t>(b.size()));
  out_.insert(out_.end(), b.begin(), b.end());
  return *this;
}

ByteWriter& ByteWriter::tag(std::string_view domain) {
  return blob(ByteView{reinterpret_cast<const std::uint8_t*>(domain.data()), domain.size()});
}

void ByteReader::need(std::size_t n) const {
  if (in_.size() - pos_ < n) throw DecodeError("truncated input");
}

std::uint8_t ByteReader::u8() {
  need(1);
  return in_[pos_++];
}

std::uint32_t ByteReader::u32() {
  need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | in_[pos_++];
  return v;
}

std::uint64_t ByteReader::u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | in_[pos_++];
  return v;
}

Hash256 ByteReader::hash() {
  need(32);
  Hash256 h;
  std::memcpy(h.bytes.data(), in_.data() + pos_, 32);
  pos_ += 32;
  return h;
}

Bytes ByteReader::blob() {
  auto n = u32();
  need(n);
  Bytes b(in_.begin() + static_cast<std::ptrdiff_t>(pos_), in_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
  pos_ += n;
  return b;
}

}  // namespace algosim
