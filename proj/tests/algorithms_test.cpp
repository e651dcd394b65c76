#include <random>

#include <gtest/gtest.h>

#include "chokepoint/adversary.hpp"
#include "chokepoint/algorithms.hpp"
#include "chokepoint/model.hpp"

namespace chokepoint::algorithms {
namespace {

OutputVector ints(std::initializer_list<long> v) { return {v.begin(), v.end()}; }

// Independent oracle for expected outputs.
OutputVector brute_force_output(const InputInstance& in) {
  OutputVector out(in.n(), 0);
  for (std::size_t i = 0; i < in.n(); ++i) {
    for (std::size_t j = 0; j < in.n(); ++j) {
      if (j != i) out[i] += in.values()[j];
    }
  }
  return out;
}

std::vector<AlgorithmSpec> correct_algorithms() {
  return {two_pass_standard(), two_pass_optimized(), first_pass_minimal()};
}

std::uint64_t reads_before_earliest_final_write(const ExecutionTrace& trace) {
  return split_passes(trace).first_pass_reads;
}

TEST(Standard, Examples) {
  auto t = execute(two_pass_standard(), InputInstance(2, {1, 2, 3}), 64);
  EXPECT_EQ(t.final_output, ints({5, 4, 3}));
  EXPECT_EQ(t.read_count(), 6u);
  t = execute(two_pass_standard(), InputInstance(1, {0, 0}), 64);
  EXPECT_EQ(t.final_output, ints({0, 0}));
  EXPECT_EQ(t.read_count(), 4u);
  t = execute(two_pass_standard(), InputInstance(3, {5}), 64);
  EXPECT_EQ(t.final_output, ints({0}));
  EXPECT_EQ(t.read_count(), 0u);
}

TEST(Optimized, Examples) {
  auto t = execute(two_pass_optimized(), InputInstance(2, {3, 1, 2}), 64);
  EXPECT_EQ(t.final_output, ints({3, 5, 4}));
  EXPECT_EQ(t.read_count(), 5u);
  t = execute(two_pass_optimized(), InputInstance(1, {0, 0}), 64);
  EXPECT_EQ(t.final_output, ints({0, 0}));
  EXPECT_EQ(t.read_count(), 3u);
}

TEST(Optimized, CounterSequence) {
  // C after each re-read: 6 -> 3 -> 2; the last cell is S - C = 4.
  const auto t = execute(two_pass_optimized(), InputInstance(2, {3, 1, 2}), 64);
  const unsigned width = width_for_range(Integer(3 * 3));
  std::vector<Integer> counters;
  for (const auto& c : t.checkpoints) {
    if (c.control.phase == TwoPassOptimized::kEmit && c.control.cursor > 0 && c.control.cursor % 2 == 0) {
      BitReader r(c.state);
      r.get(width);
      counters.push_back(r.get(width));
    }
  }
  EXPECT_EQ(counters, (std::vector<Integer>{3, 2}));
  // The last write is the un-read cell.
  EXPECT_EQ(t.events[t.events.size() - 2].kind, EventKind::kWriteOutput);
  EXPECT_EQ(*t.events[t.events.size() - 2].index, 2u);
}

TEST(FirstPassMinimal, Examples) {
  auto t = execute(first_pass_minimal(), InputInstance(2, {1, 2, 3}), 64);
  auto s = split_passes(t);
  EXPECT_EQ(s.boundary_cell, 0u);
  EXPECT_EQ(s.first_pass_reads, 2u);
  EXPECT_EQ(t.final_output[0], 5);
  t = execute(first_pass_minimal(), InputInstance(3, {4, 0}), 64);
  s = split_passes(t);
  EXPECT_EQ(s.first_pass_reads, 1u);
  EXPECT_EQ(t.final_output, ints({0, 4}));
}

TEST(FirstPassMinimal, ExactlyNMinusOneReadsBeforeFirstFinalWrite) {
  for (std::size_t n = 2; n <= 5; ++n) {
    for (unsigned d = 1; d <= 2; ++d) {
      for_each_input(n, d, [&](const InputInstance& in) {
        const auto t = execute(first_pass_minimal(), in, 64);
        ASSERT_EQ(reads_before_earliest_final_write(t), n - 1);
        ASSERT_EQ(split_passes(t).first_pass_distinct_reads(), n - 1);
      });
    }
  }
}

TEST(GreedyCheat, Examples) {
  auto t = execute(greedy_cheat(1), InputInstance(1, {0, 0, 0}), 64);
  EXPECT_EQ(t.final_output[0], 0);
  EXPECT_TRUE(verify_output(t).correct);
  t = execute(greedy_cheat(1), InputInstance(1, {0, 0, 1}), 64);
  EXPECT_EQ(t.final_output[0], 0);
  EXPECT_FALSE(verify_output(t).correct);
  EXPECT_THROW(execute(greedy_cheat(2), InputInstance(1, {0, 0, 1}), 64), std::invalid_argument);
  EXPECT_THROW(execute(greedy_cheat(0), InputInstance(1, {0}), 64), std::invalid_argument);
}

TEST(GreedyCheat, CounterexampleForEverySmallShape) {
  for (std::size_t n = 2; n <= 6; ++n) {
    for (unsigned d = 1; d <= 2; ++d) {
      EXPECT_TRUE(adversary::falsify(greedy_cheat(n - 2), n, d, 64).has_value()) << n << "," << d;
    }
  }
}

TEST(Correctness, ExhaustiveSmallShapes) {
  for (const auto& alg : correct_algorithms()) {
    for (std::size_t n = 1; n <= 5; ++n) {
      for (unsigned d = 1; d <= 2; ++d) {
        for_each_input(n, d, [&](const InputInstance& in) {
          const auto t = execute(alg, in, 64);
          ASSERT_EQ(t.final_output, brute_force_output(in)) << alg->name();
          ASSERT_TRUE(verify_output(t).correct);
        });
      }
    }
  }
}

TEST(Correctness, RandomLargerInstances) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 6 + rng() % 60;
    const unsigned d = 1 + static_cast<unsigned>(rng() % 64);
    std::vector<std::uint64_t> v(n);
    for (auto& x : v) x = d == 64 ? rng() : rng() & ((std::uint64_t{1} << d) - 1);
    const InputInstance in(d, v);
    for (const auto& alg : correct_algorithms()) {
      const auto t = execute(alg, in, 1024);
      ASSERT_EQ(t.final_output, brute_force_output(in)) << alg->name();
    }
  }
}

TEST(ReadCounts, EveryInput) {
  for (std::size_t n = 2; n <= 5; ++n) {
    for (unsigned d = 1; d <= 2; ++d) {
      for_each_input(n, d, [&](const InputInstance& in) {
        ASSERT_EQ(execute(two_pass_standard(), in, 64).read_count(), 2 * n);
        ASSERT_EQ(execute(two_pass_optimized(), in, 64).read_count(), 2 * n - 1);
        ASSERT_EQ(reads_before_earliest_final_write(execute(first_pass_minimal(), in, 64)), n - 1);
      });
    }
  }
}

TEST(SummarySize, PhaseMarkStateFitsStandardSizing) {
  for (const auto& alg : {two_pass_standard(), two_pass_optimized()}) {
    for (std::size_t n = 1; n <= 5; ++n) {
      for (unsigned d = 1; d <= 3; ++d) {
        const std::uint64_t limit = d + ceil_log2(n);
        for_each_input(n, d, [&](const InputInstance& in) {
          const auto t = execute(alg, in, 64);
          const auto split = n >= 2 ? std::optional(split_passes(t)) : std::nullopt;
          for (const auto& c : t.checkpoints) {
            if (split && c.tick == *split->phase_mark_tick + 1) {
              ASSERT_LE(c.state.size(), limit);
            }
          }
        });
      }
    }
  }
}

TEST(Obliviousness, AllCorrectAlgorithms) {
  for (const auto& alg : correct_algorithms()) {
    for (std::size_t n = 1; n <= 4; ++n) {
      for (unsigned d = 1; d <= 2; ++d) EXPECT_TRUE(oblivious_control_check(alg, n, d, 64)) << alg->name();
    }
  }
}

TEST(ByName, ResolvesAllNames) {
  EXPECT_EQ(by_name("standard")->name(), "standard");
  EXPECT_EQ(by_name("optimized")->name(), "optimized");
  EXPECT_EQ(by_name("first-pass-minimal")->name(), "first-pass-minimal");
  EXPECT_EQ(by_name("cheat:3")->name(), "cheat:3");
  EXPECT_THROW(by_name("cheat:"), std::invalid_argument);
  EXPECT_THROW(by_name("cheat:x"), std::invalid_argument);
  EXPECT_THROW(by_name("fast"), std::invalid_argument);
}

}  // namespace
}  // namespace chokepoint::algorithms
