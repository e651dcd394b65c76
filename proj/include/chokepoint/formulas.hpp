#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "chokepoint/bits.hpp"
#include "chokepoint/instance.hpp"

namespace chokepoint::formulas {

// Out[i] = sum_{j != i} In[j], computed as S - In[i].
inline OutputVector forward_map(const InputInstance& in) {
  Integer total = 0;
  for (auto v : in.values()) total += v;
  OutputVector out;
  out.reserve(in.n());
  for (auto v : in.values()) out.push_back(total - v);
  return out;
}

class ReconstructError : public std::runtime_error {
 public:
  enum class Kind { kNotDivisible, kOutOfDomain };

  ReconstructError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Inverts forward_map. The output sum equals (n-1)S, so S is recovered by exact
// division and In[i] = S - Out[i]. With `d` given, every recovered element is
// checked against [0, 2^d - 1].
inline std::vector<Integer> reconstruct(const OutputVector& out, std::optional<unsigned> d = std::nullopt) {
  const std::size_t n = out.size();
  if (n < 2) throw std::invalid_argument("reconstruct: needs n >= 2");
  Integer out_sum = 0;
  for (const auto& v : out) out_sum += v;
  const Integer divisor = n - 1;
  if (out_sum % divisor != 0) {
    throw ReconstructError(ReconstructError::Kind::kNotDivisible,
                           "output sum " + out_sum.str() + " is not divisible by n-1 = " + divisor.str());
  }
  const Integer total = out_sum / divisor;
  std::vector<Integer> in;
  in.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Integer v = total - out[i];
    if (d && (v < 0 || v > word_max(*d))) {
      throw ReconstructError(ReconstructError::Kind::kOutOfDomain,
                             "recovered In[" + std::to_string(i) + "] = " + v.str() + " is outside [0, 2^" +
                                 std::to_string(*d) + " - 1]");
    }
    in.push_back(std::move(v));
  }
  return in;
}

inline InputInstance reconstruct_instance(const OutputVector& out, unsigned d) {
  auto elems = reconstruct(out, d);
  std::vector<std::uint64_t> values;
  values.reserve(elems.size());
  for (const auto& e : elems) values.push_back(static_cast<std::uint64_t>(e));
  return InputInstance(d, std::move(values));
}

struct OutputSumIdentity {
  Integer output_sum;
  Integer input_sum;
  bool holds;
};

inline OutputSumIdentity output_sum_identity(const InputInstance& in) {
  Integer input_sum = 0;
  for (auto v : in.values()) input_sum += v;
  Integer output_sum = 0;
  for (const auto& v : forward_map(in)) output_sum += v;
  const bool holds = output_sum == Integer(in.n() - 1) * input_sum;
  return {output_sum, input_sum, holds};
}

inline std::int64_t first_pass_bound(std::int64_t n) { return n - 1; }

// n - floor(t/d). Negative or zero when t >= nd; the bound is vacuous there.
inline std::int64_t second_pass_bound(std::int64_t n, std::int64_t d, std::int64_t t) {
  if (d < 1) throw std::invalid_argument("second_pass_bound: d must be >= 1");
  if (t < 0) throw std::invalid_argument("second_pass_bound: t must be >= 0");
  return n - t / d;
}

// nd - t, the bit form of the second-pass bound.
inline Integer second_pass_bound_bits(std::int64_t n, std::int64_t d, std::int64_t t) {
  return Integer(n) * d - t;
}

inline std::int64_t total_bound(std::int64_t n, std::int64_t d, std::int64_t t) {
  return first_pass_bound(n) + second_pass_bound(n, d, t);
}

// d + ceil(log2 n): enough bits to hold S <= n(2^d - 1).
inline std::int64_t standard_memory_bits(std::uint64_t n, std::int64_t d) {
  if (n < 1 || d < 1) throw std::invalid_argument("standard_memory_bits: n and d must be >= 1");
  return d + ceil_log2(n);
}

// floor(ceil(log2 n) / d): how far the counter algorithm's second phase
// exceeds the second-pass bound at t = d + ceil(log2 n).
inline std::int64_t read_gap(std::uint64_t n, std::int64_t d) {
  if (n < 1 || d < 1) throw std::invalid_argument("read_gap: n and d must be >= 1");
  return static_cast<std::int64_t>(ceil_log2(n)) / d;
}

// ceil(n - t/d) == n - floor(t/d), the left side in exact rational arithmetic.
inline bool floor_ceiling_identity(std::int64_t n, std::int64_t t, std::int64_t d) {
  if (d < 1) throw std::invalid_argument("floor_ceiling_identity: d must be >= 1");
  using Q = boost::rational<std::int64_t>;
  const Q x = Q(n) - Q(t, d);
  // boost::rational keeps the denominator positive.
  std::int64_t q = x.numerator() / x.denominator();
  if (q * x.denominator() < x.numerator()) ++q;
  const std::int64_t lhs = q;

  std::int64_t fl = t / d;
  if (fl * d > t) --fl;
  const std::int64_t rhs = n - fl;
  return lhs == rhs;
}

// Reads performed by the reference algorithms, n >= 2.
inline std::int64_t standard_reads(std::int64_t n) { return n >= 2 ? 2 * n : 0; }
inline std::int64_t optimized_reads(std::int64_t n) { return n >= 2 ? 2 * n - 1 : 0; }
inline std::int64_t optimized_second_phase_reads(std::int64_t n) { return n >= 2 ? n - 1 : 0; }

struct BoundsReport {
  std::int64_t n = 0;
  std::int64_t d = 0;
  std::int64_t t = 0;
  std::int64_t first_pass_bound = 0;
  std::int64_t second_pass_bound_raw = 0;
  std::int64_t total_bound = 0;
  std::int64_t standard_memory_bits = 0;
  std::int64_t read_gap = 0;
  // Comparison against the reference algorithms. The standard algorithm is
  // compared on total reads; the counter algorithm on its second phase
  // (n-1 reads) against the second-pass bound, and also on totals.
  std::int64_t standard_reads = 0;
  std::int64_t optimized_reads = 0;
  std::int64_t standard_gap = 0;
  std::int64_t optimized_gap = 0;
  std::int64_t optimized_total_gap = 0;

  std::int64_t second_pass_bound_clamped() const { return std::max<std::int64_t>(second_pass_bound_raw, 0); }
  bool vacuous() const { return second_pass_bound_raw <= 0; }
};

inline BoundsReport bounds_report(std::int64_t n, std::int64_t d, std::int64_t t) {
  if (n < 1 || d < 1 || t < 0) throw std::invalid_argument("bounds_report: need n >= 1, d >= 1, t >= 0");
  BoundsReport r;
  r.n = n;
  r.d = d;
  r.t = t;
  r.first_pass_bound = first_pass_bound(n);
  r.second_pass_bound_raw = second_pass_bound(n, d, t);
  r.total_bound = total_bound(n, d, t);
  r.standard_memory_bits = standard_memory_bits(static_cast<std::uint64_t>(n), d);
  r.read_gap = read_gap(static_cast<std::uint64_t>(n), d);
  r.standard_reads = standard_reads(n);
  r.optimized_reads = optimized_reads(n);
  r.standard_gap = r.standard_reads - r.total_bound;
  r.optimized_gap = optimized_second_phase_reads(n) - r.second_pass_bound_raw;
  r.optimized_total_gap = r.optimized_reads - r.total_bound;
  return r;
}

inline const char* bounds_csv_header() {
  return "n,d,t,first_pass_bound,second_pass_bound_raw,total_bound,standard_memory_bits,read_gap,"
         "standard_reads,optimized_reads,standard_gap,optimized_gap,optimized_total_gap";
}

inline std::string to_csv(const BoundsReport& r) {
  std::string s;
  for (std::int64_t v : {r.n, r.d, r.t, r.first_pass_bound, r.second_pass_bound_raw, r.total_bound,
                         r.standard_memory_bits, r.read_gap, r.standard_reads, r.optimized_reads, r.standard_gap,
                         r.optimized_gap, r.optimized_total_gap}) {
    if (!s.empty()) s.push_back(',');
    s += std::to_string(v);
  }
  return s;
}

}  // namespace chokepoint::formulas
