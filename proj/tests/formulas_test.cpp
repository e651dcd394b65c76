#include <random>

#include <gtest/gtest.h>

#include "chokepoint/formulas.hpp"

namespace chokepoint::formulas {
namespace {

// Definitional oracle: Out[i] summed directly over j != i.
OutputVector brute_force_output(const InputInstance& in) {
  OutputVector out(in.n(), 0);
  for (std::size_t i = 0; i < in.n(); ++i) {
    for (std::size_t j = 0; j < in.n(); ++j) {
      if (j != i) out[i] += in.values()[j];
    }
  }
  return out;
}

std::vector<Integer> as_integers(const InputInstance& in) {
  return {in.values().begin(), in.values().end()};
}

OutputVector ints(std::initializer_list<long> v) { return {v.begin(), v.end()}; }

TEST(ForwardMap, Examples) {
  EXPECT_EQ(forward_map(InputInstance(2, {1, 2, 3})), ints({5, 4, 3}));
  EXPECT_EQ(forward_map(InputInstance(3, {7})), ints({0}));
  EXPECT_EQ(forward_map(InputInstance(4, {9, 14})), ints({14, 9}));
}

TEST(ForwardMap, AgreesWithDefinitionExhaustively) {
  for (std::size_t n = 1; n <= 5; ++n) {
    for (unsigned d = 1; d <= 2; ++d) {
      for_each_input(n, d, [&](const InputInstance& in) { ASSERT_EQ(forward_map(in), brute_force_output(in)); });
    }
  }
}

TEST(ForwardMap, OutputsStayInDomain) {
  for (std::size_t n = 1; n <= 4; ++n) {
    for (unsigned d = 1; d <= 3; ++d) {
      const Integer hi = Integer(n - 1) * word_max(d);
      for_each_input(n, d, [&](const InputInstance& in) {
        for (const auto& v : forward_map(in)) {
          ASSERT_GE(v, 0);
          ASSERT_LE(v, hi);
        }
      });
    }
  }
}

TEST(Reconstruct, Examples) {
  EXPECT_EQ(reconstruct(ints({5, 4, 3})), ints({1, 2, 3}));
  EXPECT_EQ(reconstruct(ints({0, 0, 0, 0})), ints({0, 0, 0, 0}));
  EXPECT_EQ(reconstruct(ints({1, 1, 2})), ints({1, 1, 0}));
}

TEST(Reconstruct, OddSumAtThreeIsNotAValidOutput) {
  try {
    reconstruct(ints({1, 2, 2}));
    FAIL() << "expected NotDivisible";
  } catch (const ReconstructError& e) {
    EXPECT_EQ(e.kind(), ReconstructError::Kind::kNotDivisible);
  }
  // No small valid input maps to it.
  for (unsigned d = 1; d <= 3; ++d) {
    for_each_input(3, d, [&](const InputInstance& in) { ASSERT_NE(forward_map(in), ints({1, 2, 2})); });
  }
}

TEST(Reconstruct, OutOfDomainWhenWidthGiven) {
  // S = 4, recovers [4, 0]: fine unbounded, outside d = 2.
  EXPECT_EQ(reconstruct(ints({0, 4})), ints({4, 0}));
  try {
    reconstruct(ints({0, 4}), 2);
    FAIL() << "expected OutOfDomain";
  } catch (const ReconstructError& e) {
    EXPECT_EQ(e.kind(), ReconstructError::Kind::kOutOfDomain);
  }
  EXPECT_THROW(reconstruct(ints({5, -1}), 4), ReconstructError);
  EXPECT_THROW(reconstruct(ints({5})), std::invalid_argument);
}

TEST(Reconstruct, InvertsForwardMapExhaustively) {
  for (std::size_t n = 2; n <= 4; ++n) {
    for (unsigned d = 1; d <= 2; ++d) {
      for_each_input(n, d, [&](const InputInstance& in) {
        ASSERT_EQ(reconstruct(forward_map(in), d), as_integers(in));
        ASSERT_EQ(reconstruct_instance(forward_map(in), d), in);
      });
    }
  }
}

TEST(Reconstruct, InvertsForwardMapOnRandomWideInstances) {
  std::mt19937_64 rng(20240611);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 2 + rng() % 999;
    const unsigned d = 1 + static_cast<unsigned>(rng() % 64);
    std::vector<std::uint64_t> v(n);
    for (auto& x : v) x = d == 64 ? rng() : rng() & ((std::uint64_t{1} << d) - 1);
    const InputInstance in(d, v);
    ASSERT_EQ(reconstruct(forward_map(in), d), as_integers(in));
    ASSERT_TRUE(output_sum_identity(in).holds);
  }
}

TEST(OutputSumIdentity, Examples) {
  auto r = output_sum_identity(InputInstance(2, {1, 2, 3}));
  EXPECT_EQ(r.output_sum, 12);
  EXPECT_EQ(r.input_sum, 6);
  EXPECT_TRUE(r.holds);
  r = output_sum_identity(InputInstance(3, {0, 0, 0, 0}));
  EXPECT_EQ(r.output_sum, 0);
  EXPECT_EQ(r.input_sum, 0);
  EXPECT_TRUE(r.holds);
  r = output_sum_identity(InputInstance(4, {11}));
  EXPECT_EQ(r.output_sum, 0);
  EXPECT_EQ(r.input_sum, 11);
  EXPECT_TRUE(r.holds);
}

TEST(Bounds, FirstPass) {
  EXPECT_EQ(first_pass_bound(2), 1);
  EXPECT_EQ(first_pass_bound(5), 4);
}

TEST(Bounds, SecondPass) {
  EXPECT_EQ(second_pass_bound(1024, 32, 42), 1023);
  for (std::int64_t n = 1; n < 10; ++n) EXPECT_EQ(second_pass_bound(n, 3, 0), n);
  EXPECT_EQ(second_pass_bound(2, 1, 2), 0);
  EXPECT_EQ(second_pass_bound(2, 1, 5), -3);
  EXPECT_EQ(second_pass_bound_bits(1024, 32, 42), 32726);
}

TEST(Bounds, Total) {
  EXPECT_EQ(total_bound(2, 1, 1), 2);
  EXPECT_EQ(total_bound(3, 2, 4), 3);
  // At t = d + ceil(log2 n): 2n - 2 - floor(ceil(log2 n) / d).
  for (std::int64_t n = 1; n < 200; ++n) {
    for (std::int64_t d = 1; d <= 8; ++d) {
      const auto t = standard_memory_bits(static_cast<std::uint64_t>(n), d);
      EXPECT_EQ(total_bound(n, d, t), 2 * n - 2 - static_cast<std::int64_t>(ceil_log2(n)) / d);
      EXPECT_EQ(total_bound(n, d, t), first_pass_bound(n) + second_pass_bound(n, d, t));
    }
  }
}

TEST(Bounds, StandardMemoryBits) {
  EXPECT_EQ(standard_memory_bits(1'000'000, 32), 52);
  EXPECT_EQ(standard_memory_bits(1, 8), 8);
  // The largest possible sum fits.
  for (std::uint64_t n = 1; n < 300; ++n) {
    for (std::int64_t d = 1; d <= 6; ++d) {
      EXPECT_LE(width_for_range(Integer(n) * word_max(static_cast<unsigned>(d))),
                static_cast<unsigned>(standard_memory_bits(n, d)));
    }
  }
}

TEST(Bounds, ReadGap) {
  EXPECT_EQ(read_gap(std::uint64_t{1} << 31, 32), 0);
  EXPECT_EQ(read_gap(std::uint64_t{1} << 40, 32), 1);
  // Zero exactly up to n = 2^(d-1).
  for (std::int64_t d = 1; d <= 6; ++d) {
    const std::uint64_t edge = std::uint64_t{1} << (d - 1);
    EXPECT_EQ(read_gap(edge, d), 0);
    EXPECT_EQ(read_gap(edge + 1, d), 1);
  }
}

TEST(Bounds, ReportAtPracticalSizes) {
  const auto r = bounds_report(std::int64_t{1} << 31, 32, 63);
  EXPECT_EQ(r.read_gap, 0);
  EXPECT_EQ(r.standard_gap, 2);
  EXPECT_EQ(r.optimized_gap, 0);
  EXPECT_EQ(r.optimized_total_gap, 1);
  const auto vacuous = bounds_report(2, 1, 9);
  EXPECT_EQ(vacuous.second_pass_bound_raw, -7);
  EXPECT_EQ(vacuous.second_pass_bound_clamped(), 0);
  EXPECT_TRUE(vacuous.vacuous());
}

TEST(FloorCeiling, Examples) {
  EXPECT_TRUE(floor_ceiling_identity(5, 3, 2));
  EXPECT_TRUE(floor_ceiling_identity(5, 4, 2));
}

TEST(FloorCeiling, ExhaustiveGridAgainstSearchOracle) {
  for (std::int64_t n = 0; n <= 64; ++n) {
    for (std::int64_t t = 0; t <= 64; ++t) {
      for (std::int64_t d = 1; d <= 8; ++d) {
        // Smallest integer k with k >= n - t/d, i.e. k*d >= n*d - t.
        std::int64_t k = -100;
        while (k * d < n * d - t) ++k;
        ASSERT_EQ(k, n - t / d);
        ASSERT_TRUE(floor_ceiling_identity(n, t, d));
      }
    }
  }
}

}  // namespace
}  // namespace chokepoint::formulas
