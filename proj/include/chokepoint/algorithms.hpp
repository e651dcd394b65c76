#pragma once

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "chokepoint/bits.hpp"
#include "chokepoint/model.hpp"

namespace chokepoint::algorithms {

namespace detail {

// Width of a running sum of `count` d-bit words.
inline unsigned sum_width(std::size_t count, unsigned d) { return width_for_range(Integer(count) * word_max(d)); }

// Every correct algorithm handles n = 1 the same way: Out[0] = 0, no reads.
inline Action trivial_next(Control& control) {
  if (control.phase == 0) {
    control.phase = 1;
    return WriteOutput{0, Integer(0)};
  }
  return Halt{};
}

}  // namespace detail

// Pass 1 sums the input into S; pass 2 re-reads each In[i] and writes S - In[i].
struct TwoPassStandard {
  struct State {
    Integer sum = 0;
    Integer current = 0;  // held between reading In[i] and writing Out[i]
  };

  enum Phase : std::uint32_t { kSum = 0, kEmit = 1, kDone = 2 };

  std::string name() const { return "standard"; }
  bool oblivious() const { return true; }
  void check_shape(Shape s) const {
    if (s.n < 1 || s.d < 1) throw std::invalid_argument("standard: need n >= 1, d >= 1");
  }
  State init(Shape) const { return {}; }

  Action next(Shape s, Control& c, State& st) const {
    if (s.n == 1) return detail::trivial_next(c);
    switch (c.phase) {
      case kSum:
        if (c.cursor < s.n) return ReadInput{c.cursor++};
        c.phase = kEmit;
        c.cursor = 0;
        return PhaseMark{"second-phase"};
      case kEmit: {
        const std::size_t i = c.cursor / 2;
        if (i == s.n) {
          c.phase = kDone;
          return Halt{};
        }
        if (c.cursor++ % 2 == 0) return ReadInput{i};
        Integer value = st.sum - st.current;
        st.current = 0;
        return WriteOutput{i, std::move(value)};
      }
      default:
        return Halt{};
    }
  }

  void absorb(Shape, Control& c, State& st, Word w) const {
    if (c.phase == kSum) {
      st.sum += w.value();
    } else {
      st.current = w.value();
    }
  }

  static bool holds_current(const Control& c) { return c.phase == kEmit && c.cursor % 2 == 1; }

  void save(Shape s, const Control& c, const State& st, BitWriter& w) const {
    if (s.n == 1) return;
    w.put(st.sum, detail::sum_width(s.n, s.d));
    if (holds_current(c)) w.put(st.current, s.d);
  }

  State load(Shape s, const Control& c, BitReader& r) const {
    State st;
    if (s.n == 1) return st;
    st.sum = r.get(detail::sum_width(s.n, s.d));
    if (holds_current(c)) st.current = r.get(s.d);
    return st;
  }
};

// The running-counter variant: C tracks the sum of elements not yet re-read,
// so Out[n-1] = S - C is written without a final read. 2n - 1 reads.
struct TwoPassOptimized {
  struct State {
    Integer sum = 0;
    Integer remaining = 0;  // C, live from the first step after the phase mark
    Integer current = 0;
  };

  enum Phase : std::uint32_t { kSum = 0, kEmit = 1, kDone = 2 };

  std::string name() const { return "optimized"; }
  bool oblivious() const { return true; }
  void check_shape(Shape s) const {
    if (s.n < 1 || s.d < 1) throw std::invalid_argument("optimized: need n >= 1, d >= 1");
  }
  State init(Shape) const { return {}; }

  Action next(Shape s, Control& c, State& st) const {
    if (s.n == 1) return detail::trivial_next(c);
    switch (c.phase) {
      case kSum:
        if (c.cursor < s.n) return ReadInput{c.cursor++};
        c.phase = kEmit;
        c.cursor = 0;
        return PhaseMark{"second-phase"};
      case kEmit: {
        if (c.cursor == 0) st.remaining = st.sum;
        const std::size_t i = c.cursor / 2;
        if (i == s.n - 1) {
          c.phase = kDone;
          Integer value = st.sum - st.remaining;
          st.remaining = 0;
          return WriteOutput{i, std::move(value)};
        }
        if (c.cursor++ % 2 == 0) return ReadInput{i};
        st.remaining -= st.current;
        Integer value = st.sum - st.current;
        st.current = 0;
        return WriteOutput{i, std::move(value)};
      }
      default:
        return Halt{};
    }
  }

  void absorb(Shape, Control& c, State& st, Word w) const {
    if (c.phase == kSum) {
      st.sum += w.value();
    } else {
      st.current = w.value();
    }
  }

  static bool holds_remaining(const Control& c) { return c.phase == kEmit && c.cursor > 0; }
  static bool holds_current(const Control& c) { return c.phase == kEmit && c.cursor % 2 == 1; }

  void save(Shape s, const Control& c, const State& st, BitWriter& w) const {
    if (s.n == 1 || c.phase == kDone) return;
    const unsigned width = detail::sum_width(s.n, s.d);
    w.put(st.sum, width);
    if (holds_remaining(c)) w.put(st.remaining, width);
    if (holds_current(c)) w.put(st.current, s.d);
  }

  State load(Shape s, const Control& c, BitReader& r) const {
    State st;
    if (s.n == 1 || c.phase == kDone) return st;
    const unsigned width = detail::sum_width(s.n, s.d);
    st.sum = r.get(width);
    if (holds_remaining(c)) st.remaining = r.get(width);
    if (holds_current(c)) st.current = r.get(s.d);
    return st;
  }
};

// Reads In[1..n-1], then makes its earliest final write Out[0] after exactly
// n - 1 reads. Completes by reading In[0] once and re-reading In[i], i >= 1.
struct FirstPassMinimal {
  struct State {
    Integer sum = 0;  // partial sum in kPartial/kBridge, full sum afterwards
    Integer current = 0;
  };

  enum Phase : std::uint32_t { kPartial = 0, kBridge = 1, kEmit = 2, kDone = 3 };

  std::string name() const { return "first-pass-minimal"; }
  bool oblivious() const { return true; }
  void check_shape(Shape s) const {
    if (s.n < 1 || s.d < 1) throw std::invalid_argument("first-pass-minimal: need n >= 1, d >= 1");
  }
  State init(Shape) const { return {}; }

  Action next(Shape s, Control& c, State& st) const {
    if (s.n == 1) return detail::trivial_next(c);
    switch (c.phase) {
      case kPartial:
        if (c.cursor + 1 < s.n) return ReadInput{1 + c.cursor++};
        c.phase = kBridge;
        c.cursor = 0;
        return WriteOutput{0, st.sum};
      case kBridge:
        return ReadInput{0};
      case kEmit: {
        const std::size_t i = 1 + c.cursor / 2;
        if (i == s.n) {
          c.phase = kDone;
          return Halt{};
        }
        if (c.cursor++ % 2 == 0) return ReadInput{i};
        Integer value = st.sum - st.current;
        st.current = 0;
        return WriteOutput{i, std::move(value)};
      }
      default:
        return Halt{};
    }
  }

  void absorb(Shape, Control& c, State& st, Word w) const {
    switch (c.phase) {
      case kPartial:
        st.sum += w.value();
        break;
      case kBridge:
        st.sum += w.value();
        c.phase = kEmit;
        c.cursor = 0;
        break;
      default:
        st.current = w.value();
    }
  }

  static unsigned sum_field_width(Shape s, const Control& c) {
    return detail::sum_width(c.phase == kEmit ? s.n : s.n - 1, s.d);
  }
  static bool holds_current(const Control& c) { return c.phase == kEmit && c.cursor % 2 == 1; }

  void save(Shape s, const Control& c, const State& st, BitWriter& w) const {
    if (s.n == 1 || c.phase == kDone) return;
    w.put(st.sum, sum_field_width(s, c));
    if (holds_current(c)) w.put(st.current, s.d);
  }

  State load(Shape s, const Control& c, BitReader& r) const {
    State st;
    if (s.n == 1 || c.phase == kDone) return st;
    st.sum = r.get(sum_field_width(s, c));
    if (holds_current(c)) st.current = r.get(s.d);
    return st;
  }
};

// Deliberately wrong: reads only In[1..k], finalizes Out[0] to that partial
// sum, and fills every other cell with 0.
struct GreedyCheat {
  std::size_t k = 0;

  struct State {
    Integer partial = 0;
  };

  enum Phase : std::uint32_t { kPartial = 0, kFill = 1 };

  std::string name() const { return "cheat:" + std::to_string(k); }
  bool oblivious() const { return true; }
  void check_shape(Shape s) const {
    if (s.d < 1 || s.n < 2 || k > s.n - 2) {
      throw std::invalid_argument(name() + ": requires n >= 2 and k <= n - 2");
    }
  }
  State init(Shape) const { return {}; }

  Action next(Shape s, Control& c, State& st) const {
    if (c.phase == kPartial) {
      if (c.cursor < k) return ReadInput{1 + c.cursor++};
      c.phase = kFill;
      c.cursor = 1;
      return WriteOutput{0, st.partial};
    }
    if (c.cursor < s.n) return WriteOutput{c.cursor++, Integer(0)};
    return Halt{};
  }

  void absorb(Shape, Control&, State& st, Word w) const { st.partial += w.value(); }

  void save(Shape s, const Control&, const State& st, BitWriter& w) const {
    w.put(st.partial, detail::sum_width(k, s.d));
  }
  State load(Shape s, const Control&, BitReader& r) const { return {r.get(detail::sum_width(k, s.d))}; }
};

inline AlgorithmSpec two_pass_standard() { return make_algorithm(TwoPassStandard{}); }
inline AlgorithmSpec two_pass_optimized() { return make_algorithm(TwoPassOptimized{}); }
inline AlgorithmSpec first_pass_minimal() { return make_algorithm(FirstPassMinimal{}); }
inline AlgorithmSpec greedy_cheat(std::size_t k) { return make_algorithm(GreedyCheat{k}); }

// Resolves "standard", "optimized", "first-pass-minimal" or "cheat:k".
inline AlgorithmSpec by_name(std::string_view name) {
  if (name == "standard") return two_pass_standard();
  if (name == "optimized") return two_pass_optimized();
  if (name == "first-pass-minimal") return first_pass_minimal();
  constexpr std::string_view kCheat = "cheat:";
  if (name.starts_with(kCheat)) {
    const auto digits = name.substr(kCheat.size());
    std::size_t k = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
    if (ec == std::errc() && ptr == digits.data() + digits.size() && !digits.empty()) return greedy_cheat(k);
  }
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

}  // namespace chokepoint::algorithms
