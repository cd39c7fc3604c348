#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace algosim {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// 256-bit value ordered as a big-endian unsigned integer.
struct Hash256 {
  std::array<std::uint8_t, 32> bytes{};

  auto operator<=>(const Hash256&) const = default;

  bool is_zero() const;
  std::string hex() const;
  static Hash256 from_hex(std::string_view hex);

  /// Most significant 64 bits.
  std::uint64_t top64() const;

  /// hash / 2^256 as a value in [0, 1). Only the leading 64 bits participate.
  long double unit_interval() const;
};

struct Hash256Hasher {
  std::size_t operator()(const Hash256& h) const noexcept;
};

/// SHA-256 digest.
Hash256 hash256(ByteView payload);
Hash256 hash256(std::string_view payload);

/// Append-only canonical encoder: fixed-width big-endian integers, length-prefixed blobs.
class ByteWriter {
 public:
  ByteWriter& u8(std::uint8_t v);
  ByteWriter& u32(std::uint32_t v);
  ByteWriter& u64(std::uint64_t v);
  ByteWriter& i64(std::int64_t v) { return u64(static_cast<std::uint64_t>(v)); }
  ByteWriter& hash(const Hash256& h);
  ByteWriter& blob(ByteView b);
  ByteWriter& tag(std::string_view domain);

  const Bytes& bytes() const& { return out_; }
  Bytes take() && { return std::move(out_); }

 private:
  Bytes out_;
};

/// Reader matching ByteWriter. Throws DecodeError on truncated input.
class ByteReader {
 public:
  explicit ByteReader(ByteView in) : in_{in} {}

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  Hash256 hash();
  Bytes blob();

  bool done() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const;
  ByteView in_;
  std::size_t pos_ = 0;
};

}  // namespace algosim
