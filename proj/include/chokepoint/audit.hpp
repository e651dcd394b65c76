#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "chokepoint/adversary.hpp"
#include "chokepoint/bits.hpp"
#include "chokepoint/formulas.hpp"
#include "chokepoint/instance.hpp"
#include "chokepoint/model.hpp"
#include "chokepoint/parallel.hpp"

namespace chokepoint::audit {

// Second-pass read values as d-bit big-endian fields, zero padded to u_max.
using Transcript = BitString;

inline Transcript transcript_of(const ExecutionTrace& trace, const PassSplit& split, std::uint64_t u_max) {
  if (u_max < split.second_pass_read_bits) {
    throw std::invalid_argument("transcript_of: u_max " + std::to_string(u_max) + " is shorter than the " +
                                std::to_string(split.second_pass_read_bits) + " bits read in the second pass");
  }
  BitWriter w;
  for (const auto& e : trace.events) {
    if (e.kind == EventKind::kReadInput && e.tick >= split.boundary_tick) w.put(e.value, trace.instance.d());
  }
  Transcript t = std::move(w).bits();
  t.resize(u_max);
  return t;
}

// What crosses the choke point for one input.
struct BoundaryPair {
  BitString state;
  Transcript transcript;

  friend auto operator<=>(const BoundaryPair&, const BoundaryPair&) = default;
  friend bool operator==(const BoundaryPair&, const BoundaryPair&) = default;
};

struct PairRecord {
  InputInstance input;
  BoundaryPair pair;
};

struct AuditReport {
  std::string algorithm;
  std::size_t n = 0;
  unsigned d = 0;
  std::uint64_t inputs = 0;
  std::uint64_t t_state_bits = 0;
  std::uint64_t u_max = 0;
  std::uint64_t distinct_pairs = 0;
  bool injective = false;
  bool bit_inequality_holds = false;
  // Inputs recovered exactly by reconstruct_from_pair.
  std::uint64_t round_trips = 0;
  std::vector<PairRecord> pairs;  // filled only when requested
};

// Reads served from a transcript, in order, ignoring the requested index.
class TranscriptSource final : public InputSource {
 public:
  TranscriptSource(const Transcript& transcript, unsigned d) : reader_(transcript), d_(d) {}

  Word read(std::size_t index) override {
    if (reader_.remaining() < d_) {
      throw ModelError(ModelError::Kind::kResumeMismatch,
                       "transcript exhausted while resuming a read of In[" + std::to_string(index) + "]");
    }
    return Word(reader_.get_u64(d_), d_);
  }

 private:
  BitReader reader_;
  unsigned d_;
};

// Control register value at the pass boundary. It is input independent for
// oblivious algorithms and fixed at its default for adaptive ones, so a run on
// the all-zero input recovers it.
inline Control boundary_control(const AlgorithmSpec& alg, std::size_t n, unsigned d, std::uint64_t budget_t) {
  const auto trace = execute(alg, InputInstance(d, std::vector<std::uint64_t>(n, 0)), budget_t);
  const auto split = split_passes(trace);
  return trace.checkpoints[split.boundary_checkpoint].control;
}

namespace detail {

inline InputInstance reconstruct_at(const BitString& state, const Transcript& transcript, const Control& control,
                                    const AlgorithmSpec& alg, std::size_t n, unsigned d, std::uint64_t budget_t) {
  TranscriptSource source(transcript, d);
  auto resumed = resume(alg, Shape{n, d}, control, state, source, budget_t, std::nullopt);
  for (std::size_t i = 0; i < n; ++i) {
    if (!resumed.written[i]) {
      throw ModelError(ModelError::Kind::kIncompleteOutput,
                       "resumed run never wrote output cell " + std::to_string(i), 0, i);
    }
  }
  return formulas::reconstruct_instance(resumed.output, d);
}

}  // namespace detail

// Resumes the algorithm from a boundary state, feeding reads from the
// transcript, and inverts the resulting output.
inline InputInstance reconstruct_from_pair(const BitString& state, const Transcript& transcript,
                                           const AlgorithmSpec& alg, std::size_t n, unsigned d,
                                           std::uint64_t budget_t) {
  return detail::reconstruct_at(state, transcript, boundary_control(alg, n, d, budget_t), alg, n, d, budget_t);
}

// Enumerates all 2^(nd) inputs, captures (boundary state, padded transcript)
// for each, and checks that the map is injective and t + u >= nd.
inline AuditReport chokepoint_audit(const AlgorithmSpec& alg, std::size_t n, unsigned d, std::uint64_t budget_t,
                                    bool keep_pairs = false) {
  adversary::check_enumerable(n, d);
  if (n < 2) throw std::invalid_argument("chokepoint_audit: needs n >= 2");
  const std::uint64_t count = input_count(n, d);

  struct Captured {
    BitString state;
    ExecutionTrace trace;
    PassSplit split;
    bool correct = false;
  };
  std::vector<std::optional<Captured>> captured(count);
  parallel_for(count, [&](std::size_t k) {
    auto trace = execute(alg, input_at(n, d, k), budget_t);
    const bool correct = verify_output(trace).correct;
    auto split = split_passes(trace);
    BitString state = trace.checkpoints[split.boundary_checkpoint].state;
    captured[k] = Captured{std::move(state), std::move(trace), std::move(split), correct};
  });

  AuditReport report;
  report.algorithm = alg->name();
  report.n = n;
  report.d = d;
  report.inputs = count;
  for (const auto& c : captured) {
    if (!c->correct) {
      throw PreconditionFailed("audit refused: " + alg->name() + " is incorrect on input of shape n=" +
                               std::to_string(n) + ", d=" + std::to_string(d));
    }
    report.t_state_bits = std::max<std::uint64_t>(report.t_state_bits, c->state.size());
    report.u_max = std::max(report.u_max, c->split.second_pass_read_bits);
  }

  const Control control = boundary_control(alg, n, d, budget_t);
  std::vector<BoundaryPair> pairs(count);
  std::vector<char> recovered(count, 0);
  parallel_for(count, [&](std::size_t k) {
    const auto& c = *captured[k];
    pairs[k] = BoundaryPair{c.state, transcript_of(c.trace, c.split, report.u_max)};
    const auto back = detail::reconstruct_at(pairs[k].state, pairs[k].transcript, control, alg, n, d, budget_t);
    recovered[k] = back == c.trace.instance;
  });

  std::set<BoundaryPair> distinct(pairs.begin(), pairs.end());
  report.distinct_pairs = distinct.size();
  report.injective = report.distinct_pairs == count;
  report.bit_inequality_holds = report.t_state_bits + report.u_max >= static_cast<std::uint64_t>(n) * d;
  report.round_trips = static_cast<std::uint64_t>(std::count(recovered.begin(), recovered.end(), 1));
  if (keep_pairs) {
    report.pairs.reserve(count);
    for (std::uint64_t k = 0; k < count; ++k) report.pairs.push_back({captured[k]->trace.instance, pairs[k]});
  }
  return report;
}

}  // namespace chokepoint::audit
