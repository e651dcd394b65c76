#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "chokepoint/bits.hpp"

namespace chokepoint {

// A d-bit unsigned input word.
class Word {
 public:
  Word(std::uint64_t value, unsigned width) : value_(value), width_(width) {
    if (width == 0 || width > 64) throw std::invalid_argument("Word: width must be in [1, 64]");
    if (width < 64 && value >> width != 0) {
      throw std::out_of_range("Word: " + std::to_string(value) + " exceeds " + std::to_string(width) +
                              " bits");
    }
  }

  std::uint64_t value() const { return value_; }
  unsigned width() const { return width_; }

  friend bool operator==(const Word&, const Word&) = default;

 private:
  std::uint64_t value_;
  unsigned width_;
};

// The problem input: n words of d bits each. Read-only once built.
class InputInstance {
 public:
  InputInstance(unsigned d, std::vector<std::uint64_t> values) : d_(d), values_(std::move(values)) {
    if (values_.empty()) throw std::invalid_argument("InputInstance: n must be at least 1");
    for (auto v : values_) (void)Word(v, d_);
  }

  std::size_t n() const { return values_.size(); }
  unsigned d() const { return d_; }
  Word at(std::size_t i) const { return Word(values_.at(i), d_); }
  std::span<const std::uint64_t> values() const { return values_; }

  InputInstance with_value(std::size_t i, std::uint64_t v) const {
    auto copy = values_;
    copy.at(i) = v;
    return InputInstance(d_, std::move(copy));
  }

  friend bool operator==(const InputInstance&, const InputInstance&) = default;
  friend auto operator<=>(const InputInstance&, const InputInstance&) = default;

 private:
  unsigned d_;
  std::vector<std::uint64_t> values_;
};

using OutputVector = std::vector<Integer>;

// Visits all 2^(nd) inputs in lexicographic order (index 0 most significant).
template <typename Fn>
void for_each_input(std::size_t n, unsigned d, Fn&& fn) {
  if (n == 0 || d == 0 || n * d > 62) throw std::invalid_argument("for_each_input: nd out of range");
  const std::uint64_t base = std::uint64_t{1} << d;
  std::vector<std::uint64_t> values(n, 0);
  for (;;) {
    fn(InputInstance(d, values));
    std::size_t i = n;
    while (i > 0) {
      --i;
      if (++values[i] < base) break;
      values[i] = 0;
      if (i == 0) return;
    }
  }
}

inline std::uint64_t input_count(std::size_t n, unsigned d) {
  if (n * d > 62) throw std::invalid_argument("input_count: nd out of range");
  return std::uint64_t{1} << (n * d);
}

// The k-th input in for_each_input order.
inline InputInstance input_at(std::size_t n, unsigned d, std::uint64_t k) {
  std::vector<std::uint64_t> values(n);
  const std::uint64_t mask = (std::uint64_t{1} << d) - 1;
  for (std::size_t i = n; i-- > 0;) {
    values[i] = k & mask;
    k >>= d;
  }
  return InputInstance(d, std::move(values));
}

// 64-bit LCG (Knuth MMIX constants). Values are reduced mod 2^d.
class Lcg {
 public:
  static constexpr std::uint64_t kMultiplier = 6364136223846793005ULL;
  static constexpr std::uint64_t kIncrement = 1442695040888963407ULL;

  explicit Lcg(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ = state_ * kMultiplier + kIncrement;
    return state_;
  }

  std::uint64_t next_word(unsigned d) {
    const std::uint64_t x = next();
    return d >= 64 ? x : x & ((std::uint64_t{1} << d) - 1);
  }

 private:
  std::uint64_t state_;
};

inline InputInstance random_instance(std::size_t n, unsigned d, std::uint64_t seed) {
  Lcg rng(seed);
  std::vector<std::uint64_t> values(n);
  for (auto& v : values) v = rng.next_word(d);
  return InputInstance(d, std::move(values));
}

}  // namespace chokepoint
