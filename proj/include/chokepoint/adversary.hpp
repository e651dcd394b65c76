#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chokepoint/formulas.hpp"
#include "chokepoint/instance.hpp"
#include "chokepoint/model.hpp"
#include "chokepoint/parallel.hpp"

namespace chokepoint::adversary {

inline constexpr std::size_t kMaxEnumerationBits = 20;

// Two inputs differing only at an unread position p on which the algorithm
// writes the same final value to cell i, although the true values differ.
// `degenerate` marks the case where the base run is already wrong at cell i;
// then perturbed_input == base_input.
struct Counterexample {
  InputInstance base_input;
  InputInstance perturbed_input;
  std::size_t perturbed_index = 0;
  std::size_t affected_output_index = 0;
  Integer base_output_value;
  Integer perturbed_output_value;
  Integer true_value_on_perturbed;
  bool degenerate = false;
};

// Perturbation search around one base input. Returns nothing when the
// earliest final write is preceded by at least n - 1 distinct reads.
inline std::optional<Counterexample> find_counterexample(const AlgorithmSpec& alg, const InputInstance& base,
                                                         std::uint64_t budget_t) {
  const std::size_t n = base.n();
  if (n < 2) throw std::invalid_argument("find_counterexample: needs n >= 2");
  const auto trace = execute(alg, base, budget_t);
  const auto split = split_passes(trace);
  const auto& read_set = split.first_pass_read_index_set;
  if (read_set.size() >= n - 1) return std::nullopt;

  const std::size_t cell = split.boundary_cell;
  std::size_t p = 0;
  while (p == cell || read_set.contains(p)) ++p;

  const Integer written = trace.final_output[cell];
  const Integer truth = formulas::forward_map(base)[cell];
  if (written != truth) {
    return Counterexample{base, base, p, cell, written, written, truth, true};
  }
  const std::uint64_t values = std::uint64_t{1} << base.d();
  const std::uint64_t original = base.values()[p];
  for (std::uint64_t v = 0; v < values; ++v) {
    if (v == original) continue;
    auto perturbed = base.with_value(p, v);
    const auto other = execute(alg, perturbed, budget_t);
    const Integer perturbed_truth = formulas::forward_map(perturbed)[cell];
    if (other.written[cell] && other.final_output[cell] == written && perturbed_truth != written) {
      return Counterexample{base, std::move(perturbed), p, cell, written, written, perturbed_truth, false};
    }
  }
  return std::nullopt;
}

// Reruns both inputs and confirms the witness: identical final value at the
// affected cell, and verify_output flags that cell on the perturbed input.
inline bool replay(const AlgorithmSpec& alg, const Counterexample& cex, std::uint64_t budget_t) {
  const auto base_run = execute(alg, cex.base_input, budget_t);
  const auto perturbed_run = execute(alg, cex.perturbed_input, budget_t);
  const std::size_t i = cex.affected_output_index;
  if (!base_run.written[i] || base_run.final_output[i] != cex.base_output_value) return false;
  if (!perturbed_run.written[i] || perturbed_run.final_output[i] != cex.perturbed_output_value) return false;
  if (cex.perturbed_output_value != cex.base_output_value) return false;
  const auto verdict = verify_output(perturbed_run);
  for (const auto& m : verdict.mismatches) {
    if (m.cell == i) return m.expected == cex.true_value_on_perturbed;
  }
  return false;
}

inline void check_enumerable(std::size_t n, unsigned d) {
  if (n * d > kMaxEnumerationBits) {
    throw EnumerationTooLarge("nd = " + std::to_string(n * d) + " exceeds the exhaustive guard of " +
                              std::to_string(kMaxEnumerationBits) + " bits");
  }
}

// Tries every base input of shape (n, d) in lexicographic order and returns
// the witness for the smallest base that yields one.
inline std::optional<Counterexample> falsify(const AlgorithmSpec& alg, std::size_t n, unsigned d,
                                             std::uint64_t budget_t) {
  check_enumerable(n, d);
  const std::uint64_t count = input_count(n, d);
  std::vector<std::optional<Counterexample>> found(count);
  parallel_for(count, [&](std::size_t k) { found[k] = find_counterexample(alg, input_at(n, d, k), budget_t); });
  for (auto& f : found) {
    if (f) return std::move(f);
  }
  return std::nullopt;
}

struct FirstPassReport {
  std::size_t n = 0;
  unsigned d = 0;
  std::uint64_t inputs_checked = 0;
  std::uint64_t min_first_pass_distinct_reads = 0;
  std::uint64_t min_first_pass_reads = 0;
  std::uint64_t bound = 0;
  bool holds = false;
  std::optional<InputInstance> violating_input;
};

// Exhaustive first-pass check: every input must see at least n - 1 distinct
// positions read before the earliest final write. The algorithm must be
// correct on all 2^(nd) inputs.
inline FirstPassReport verify_first_pass_bound(const AlgorithmSpec& alg, std::size_t n, unsigned d,
                                               std::uint64_t budget_t) {
  check_enumerable(n, d);
  if (n < 2) throw std::invalid_argument("verify_first_pass_bound: needs n >= 2");
  const std::uint64_t count = input_count(n, d);
  std::vector<ExecutionTrace> traces;
  traces.reserve(count);
  for_each_input(n, d, [&](const InputInstance& in) {
    auto trace = execute(alg, in, budget_t);
    if (!verify_output(trace).correct) {
      throw PreconditionFailed(alg->name() + " is not correct on every input of shape n=" + std::to_string(n) +
                               ", d=" + std::to_string(d));
    }
    traces.push_back(std::move(trace));
  });

  FirstPassReport report;
  report.n = n;
  report.d = d;
  report.bound = n - 1;
  report.inputs_checked = count;
  report.min_first_pass_distinct_reads = UINT64_MAX;
  report.min_first_pass_reads = UINT64_MAX;
  for (const auto& trace : traces) {
    const auto split = split_passes(trace);
    if (split.first_pass_distinct_reads() < report.min_first_pass_distinct_reads) {
      report.min_first_pass_distinct_reads = split.first_pass_distinct_reads();
      if (report.min_first_pass_distinct_reads < report.bound && !report.violating_input) {
        report.violating_input = trace.instance;
      }
    }
    report.min_first_pass_reads = std::min(report.min_first_pass_reads, split.first_pass_reads);
  }
  report.holds = report.min_first_pass_distinct_reads >= report.bound;
  return report;
}

}  // namespace chokepoint::adversary
