#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace chokepoint {

// Unbounded integer used for sums and output values. Arithmetic never wraps.
using Integer = boost::multiprecision::cpp_int;

// ceil(log2 n) with ceil(log2 1) = 0.
constexpr unsigned ceil_log2(std::uint64_t n) {
  if (n <= 1) return 0;
  return static_cast<unsigned>(std::bit_width(n - 1));
}

// Bits needed for an integer in [0, max_value]: ceil(log2(max_value + 1)).
inline unsigned width_for_range(const Integer& max_value) {
  if (max_value < 0) throw std::invalid_argument("width_for_range: negative bound");
  if (max_value == 0) return 0;
  return static_cast<unsigned>(boost::multiprecision::msb(max_value)) + 1;
}

// Largest value representable in a d-bit word, 2^d - 1.
inline Integer word_max(unsigned d) { return (Integer(1) << d) - 1; }

// A finite bit string. Bits are stored in write order, most significant bit
// of each field first.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::vector<bool> bits) : bits_(std::move(bits)) {}

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  bool operator[](std::size_t i) const { return bits_[i]; }
  void push_back(bool b) { bits_.push_back(b); }

  void append(const BitString& other) {
    bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
  }

  void resize(std::size_t n) { bits_.resize(n, false); }

  // "0101..." form.
  std::string to_binary() const {
    std::string s;
    s.reserve(bits_.size());
    for (bool b : bits_) s.push_back(b ? '1' : '0');
    return s;
  }

  // Hex digits of the bit string, left aligned and zero padded to a nibble.
  // The bit length is not recoverable from the hex alone.
  std::string to_hex() const {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string s;
    for (std::size_t i = 0; i < bits_.size(); i += 4) {
      unsigned nibble = 0;
      for (std::size_t j = 0; j < 4; ++j) {
        nibble <<= 1;
        if (i + j < bits_.size() && bits_[i + j]) nibble |= 1;
      }
      s.push_back(kDigits[nibble]);
    }
    return s;
  }

  static BitString from_binary(const std::string& s) {
    BitString out;
    for (char c : s) {
      if (c != '0' && c != '1') throw std::invalid_argument("BitString: expected binary digits");
      out.push_back(c == '1');
    }
    return out;
  }

  friend bool operator==(const BitString&, const BitString&) = default;
  friend auto operator<=>(const BitString& a, const BitString& b) {
    if (auto c = a.bits_.size() <=> b.bits_.size(); c != 0) return c;
    for (std::size_t i = 0; i < a.bits_.size(); ++i) {
      if (a.bits_[i] != b.bits_[i]) return a.bits_[i] <=> b.bits_[i];
    }
    return std::strong_ordering::equal;
  }

 private:
  std::vector<bool> bits_;
};

// Packs width-declared fields big-endian, in call order.
class BitWriter {
 public:
  void put(const Integer& value, unsigned width) {
    if (value < 0) throw std::invalid_argument("BitWriter: negative field value");
    if (width_for_range(value) > width) {
      throw std::out_of_range("BitWriter: value does not fit in " + std::to_string(width) + " bits");
    }
    for (unsigned i = width; i-- > 0;) out_.push_back(boost::multiprecision::bit_test(value, i));
  }

  void put(std::uint64_t value, unsigned width) { put(Integer(value), width); }

  const BitString& bits() const& { return out_; }
  BitString bits() && { return std::move(out_); }

 private:
  BitString out_;
};

class BitReader {
 public:
  explicit BitReader(const BitString& bits) : bits_(bits) {}

  Integer get(unsigned width) {
    if (pos_ + width > bits_.size()) throw std::out_of_range("BitReader: read past end");
    Integer v = 0;
    for (unsigned i = 0; i < width; ++i) {
      v <<= 1;
      if (bits_[pos_++]) v |= 1;
    }
    return v;
  }

  std::uint64_t get_u64(unsigned width) {
    if (width > 64) throw std::out_of_range("BitReader: field wider than 64 bits");
    return static_cast<std::uint64_t>(get(width));
  }

  std::size_t remaining() const { return bits_.size() - pos_; }
  bool exhausted() const { return pos_ == bits_.size(); }

 private:
  const BitString& bits_;
  std::size_t pos_ = 0;
};

}  // namespace chokepoint
