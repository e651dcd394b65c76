#pragma once

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "chokepoint/bits.hpp"
#include "chokepoint/formulas.hpp"
#include "chokepoint/instance.hpp"

namespace chokepoint {

struct Shape {
  std::size_t n = 0;
  unsigned d = 0;
};

inline std::uint64_t default_max_steps(std::size_t n) { return 8 * static_cast<std::uint64_t>(n) + 8; }

// Uncounted control register. Only algorithms declared oblivious may use it,
// and only for input-independent bookkeeping (program phase, schedule
// position). Adaptive algorithms must leave it at its default value.
struct Control {
  std::uint32_t phase = 0;
  std::uint64_t cursor = 0;

  friend bool operator==(const Control&, const Control&) = default;
  friend auto operator<=>(const Control&, const Control&) = default;
};

struct ReadInput {
  std::size_t index;
};
struct WriteOutput {
  std::size_t index;
  Integer value;
};
struct PhaseMark {
  std::string label;
};
struct Halt {};

using Action = std::variant<ReadInput, WriteOutput, PhaseMark, Halt>;

// Live execution state of one algorithm run. The harness never keeps a
// Machine alive across a tape operation when round-tripping: it saves the
// counted state, destroys the machine and restores a fresh one from bits.
class Machine {
 public:
  virtual ~Machine() = default;
  // Chooses the next action. May update counted state and control.
  virtual Action next(Control& control) = 0;
  // Folds a just-read value into counted state.
  virtual void absorb(Control& control, Word value) = 0;
  // Canonical serialization of the counted state.
  virtual BitString save(const Control& control) const = 0;
};

class Algorithm {
 public:
  virtual ~Algorithm() = default;
  virtual std::string name() const = 0;
  virtual bool oblivious() const = 0;
  // Throws std::invalid_argument when the algorithm does not support `shape`.
  virtual void check_shape(Shape shape) const = 0;
  virtual std::unique_ptr<Machine> start(Shape shape) const = 0;
  virtual std::unique_ptr<Machine> restore(Shape shape, const Control& control, const BitString& state) const = 0;
};

using AlgorithmSpec = std::shared_ptr<const Algorithm>;

// An algorithm written as a plain state type plus pure functions over it.
template <typename Impl>
concept StateMachine = requires(const Impl& impl, Shape shape, Control& control, const Control& ccontrol,
                                typename Impl::State& state, const typename Impl::State& cstate, Word w,
                                BitWriter& writer, BitReader& reader) {
  { impl.name() } -> std::convertible_to<std::string>;
  { impl.oblivious() } -> std::same_as<bool>;
  impl.check_shape(shape);
  { impl.init(shape) } -> std::same_as<typename Impl::State>;
  { impl.next(shape, control, state) } -> std::same_as<Action>;
  impl.absorb(shape, control, state, w);
  impl.save(shape, ccontrol, cstate, writer);
  { impl.load(shape, ccontrol, reader) } -> std::same_as<typename Impl::State>;
};

template <StateMachine Impl>
class StateMachineAlgorithm final : public Algorithm {
 public:
  explicit StateMachineAlgorithm(Impl impl) : impl_(std::make_shared<const Impl>(std::move(impl))) {}

  std::string name() const override { return impl_->name(); }
  bool oblivious() const override { return impl_->oblivious(); }
  void check_shape(Shape shape) const override { impl_->check_shape(shape); }

  std::unique_ptr<Machine> start(Shape shape) const override {
    check_shape(shape);
    return std::make_unique<Live>(impl_, shape, impl_->init(shape));
  }

  std::unique_ptr<Machine> restore(Shape shape, const Control& control, const BitString& state) const override {
    BitReader reader(state);
    auto s = impl_->load(shape, control, reader);
    if (!reader.exhausted()) throw std::invalid_argument(name() + ": trailing bits in serialized state");
    return std::make_unique<Live>(impl_, shape, std::move(s));
  }

 private:
  class Live final : public Machine {
   public:
    Live(std::shared_ptr<const Impl> impl, Shape shape, typename Impl::State state)
        : impl_(std::move(impl)), shape_(shape), state_(std::move(state)) {}

    Action next(Control& control) override { return impl_->next(shape_, control, state_); }
    void absorb(Control& control, Word value) override { impl_->absorb(shape_, control, state_, value); }
    BitString save(const Control& control) const override {
      BitWriter w;
      impl_->save(shape_, control, state_, w);
      return std::move(w).bits();
    }

   private:
    std::shared_ptr<const Impl> impl_;
    Shape shape_;
    typename Impl::State state_;
  };

  std::shared_ptr<const Impl> impl_;
};

template <StateMachine Impl>
AlgorithmSpec make_algorithm(Impl impl) {
  return std::make_shared<const StateMachineAlgorithm<Impl>>(std::move(impl));
}

enum class EventKind { kReadInput, kWriteOutput, kPhaseMark, kStateSize };

inline const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::kReadInput: return "read";
    case EventKind::kWriteOutput: return "write";
    case EventKind::kPhaseMark: return "phase";
    case EventKind::kStateSize: return "state";
  }
  return "?";
}

struct TraceEvent {
  std::uint64_t tick = 0;
  EventKind kind = EventKind::kStateSize;
  // Cell or input position for reads and writes.
  std::optional<std::size_t> index;
  // Value read, value written, or state size in bits.
  Integer value = 0;
  // Phase label for kPhaseMark.
  std::string label;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

// Serialized counted state captured with each kStateSize event.
struct Checkpoint {
  std::uint64_t tick = 0;
  Control control;
  BitString state;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

struct ExecutionTrace {
  std::string algorithm;
  InputInstance instance;
  std::vector<TraceEvent> events;
  OutputVector final_output;
  std::vector<bool> written;
  std::uint64_t max_counted_state_bits = 0;
  std::uint64_t declared_budget_t = 0;
  std::vector<Checkpoint> checkpoints;

  std::size_t n() const { return instance.n(); }

  std::uint64_t read_count() const {
    return static_cast<std::uint64_t>(std::count_if(
        events.begin(), events.end(), [](const TraceEvent& e) { return e.kind == EventKind::kReadInput; }));
  }

  std::uint64_t distinct_read_count() const {
    std::set<std::size_t> seen;
    for (const auto& e : events) {
      if (e.kind == EventKind::kReadInput) seen.insert(*e.index);
    }
    return seen.size();
  }
};

class ModelError : public std::runtime_error {
 public:
  enum class Kind {
    kBudgetExceeded,
    kStepLimitExceeded,
    kInvalidAction,
    kUncountedControl,
    kIncompleteOutput,
    kResumeMismatch,
  };

  ModelError(Kind kind, std::string what, std::uint64_t tick = 0, std::uint64_t detail = 0)
      : std::runtime_error(std::move(what)), kind_(kind), tick_(tick), detail_(detail) {}

  Kind kind() const { return kind_; }
  std::uint64_t tick() const { return tick_; }
  // Bits for kBudgetExceeded, cell for kIncompleteOutput.
  std::uint64_t detail() const { return detail_; }

 private:
  Kind kind_;
  std::uint64_t tick_;
  std::uint64_t detail_;
};

// Where reads come from. Execution reads the instance; resumption reads a
// recorded transcript.
class InputSource {
 public:
  virtual ~InputSource() = default;
  virtual Word read(std::size_t index) = 0;
};

class InstanceSource final : public InputSource {
 public:
  explicit InstanceSource(const InputInstance& in) : in_(in) {}
  Word read(std::size_t index) override { return in_.at(index); }

 private:
  const InputInstance& in_;
};

namespace detail {

struct RunLog {
  std::vector<TraceEvent> events;
  OutputVector output;
  std::vector<bool> written;
  std::uint64_t max_bits = 0;
  std::vector<Checkpoint> checkpoints;
};

inline RunLog drive(const Algorithm& alg, Shape shape, std::unique_ptr<Machine> machine, Control control,
                    InputSource& source, std::uint64_t budget_t, std::uint64_t max_steps, bool round_trip) {
  RunLog log;
  log.output.assign(shape.n, 0);
  log.written.assign(shape.n, false);
  std::uint64_t tick = 0;
  const bool adaptive = !alg.oblivious();
  const Control initial_control = control;

  auto checkpoint = [&] {
    BitString bits = machine->save(control);
    const std::uint64_t size = bits.size();
    log.max_bits = std::max(log.max_bits, size);
    const std::uint64_t at = tick++;
    log.events.push_back({at, EventKind::kStateSize, std::nullopt, Integer(size), {}});
    if (size > budget_t) {
      throw ModelError(ModelError::Kind::kBudgetExceeded,
                       alg.name() + ": counted state of " + std::to_string(size) + " bits exceeds budget " +
                           std::to_string(budget_t) + " at tick " + std::to_string(at),
                       at, size);
    }
    if (round_trip) {
      machine.reset();
      machine = alg.restore(shape, control, bits);
    }
    log.checkpoints.push_back({at, control, std::move(bits)});
  };

  auto check_index = [&](std::size_t index, const char* what) {
    if (index >= shape.n) {
      throw ModelError(ModelError::Kind::kInvalidAction,
                       alg.name() + ": " + what + " index " + std::to_string(index) + " out of range at tick " +
                           std::to_string(tick),
                       tick, index);
    }
  };

  checkpoint();
  std::uint64_t steps = 0;
  for (;;) {
    Action action = machine->next(control);
    if (adaptive && control != initial_control) {
      throw ModelError(ModelError::Kind::kUncountedControl,
                       alg.name() + ": adaptive algorithm modified the uncounted control register", tick);
    }
    if (std::holds_alternative<Halt>(action)) break;
    if (steps == max_steps) {
      throw ModelError(ModelError::Kind::kStepLimitExceeded,
                       alg.name() + ": no halt within " + std::to_string(max_steps) + " steps", tick, max_steps);
    }
    ++steps;

    if (auto* r = std::get_if<ReadInput>(&action)) {
      check_index(r->index, "read");
      const Word w = source.read(r->index);
      log.events.push_back({tick++, EventKind::kReadInput, r->index, Integer(w.value()), {}});
      machine->absorb(control, w);
      if (adaptive && control != initial_control) {
        throw ModelError(ModelError::Kind::kUncountedControl,
                         alg.name() + ": adaptive algorithm modified the uncounted control register", tick);
      }
    } else if (auto* wr = std::get_if<WriteOutput>(&action)) {
      check_index(wr->index, "write");
      log.events.push_back({tick++, EventKind::kWriteOutput, wr->index, wr->value, {}});
      log.output[wr->index] = wr->value;
      log.written[wr->index] = true;
    } else if (auto* p = std::get_if<PhaseMark>(&action)) {
      log.events.push_back({tick++, EventKind::kPhaseMark, std::nullopt, Integer(0), p->label});
    }
    checkpoint();
  }
  return log;
}

}  // namespace detail

// Runs `alg` on `instance` under a `budget_t`-bit memory budget. Between every
// pair of operations the counted state is serialized, measured, and (when
// `round_trip` is set) the live machine is destroyed and rebuilt from the
// bits. `round_trip = false` gives the reference run used to test that the
// serialization loses nothing.
inline ExecutionTrace execute(const AlgorithmSpec& alg, const InputInstance& instance, std::uint64_t budget_t,
                              std::optional<std::uint64_t> max_steps = std::nullopt, bool round_trip = true) {
  if (budget_t < 1) throw std::invalid_argument("execute: budget_t must be >= 1");
  const Shape shape{instance.n(), instance.d()};
  const std::uint64_t cap = max_steps.value_or(default_max_steps(instance.n()));
  if (cap < 1) throw std::invalid_argument("execute: max_steps must be >= 1");
  InstanceSource source(instance);
  auto log = detail::drive(*alg, shape, alg->start(shape), Control{}, source, budget_t, cap, round_trip);
  ExecutionTrace trace{alg->name(),
                       instance,
                       std::move(log.events),
                       std::move(log.output),
                       std::move(log.written),
                       log.max_bits,
                       budget_t,
                       std::move(log.checkpoints)};
  return trace;
}

struct ResumeResult {
  OutputVector output;
  std::vector<bool> written;
  std::vector<TraceEvent> events;
  std::uint64_t max_counted_state_bits = 0;
};

// Continues an execution from a saved (control, counted state) pair, taking
// reads from `source`.
inline ResumeResult resume(const AlgorithmSpec& alg, Shape shape, const Control& control, const BitString& state,
                           InputSource& source, std::uint64_t budget_t, std::optional<std::uint64_t> max_steps) {
  alg->check_shape(shape);
  const std::uint64_t cap = max_steps.value_or(default_max_steps(shape.n));
  auto log = detail::drive(*alg, shape, alg->restore(shape, control, state), control, source, budget_t, cap, true);
  return {std::move(log.output), std::move(log.written), std::move(log.events), log.max_bits};
}

inline std::uint64_t measure_state_bits(const BitString& serialized_state) { return serialized_state.size(); }

struct PassSplit {
  std::uint64_t boundary_tick = 0;
  // Cell receiving the earliest final write.
  std::size_t boundary_cell = 0;
  std::uint64_t first_pass_reads = 0;
  std::uint64_t second_pass_reads = 0;
  std::uint64_t second_pass_read_bits = 0;
  std::uint64_t boundary_state_bits = 0;
  // Position in ExecutionTrace::checkpoints of the state crossing the boundary.
  std::size_t boundary_checkpoint = 0;
  std::set<std::size_t> first_pass_read_index_set;
  std::set<std::size_t> second_pass_read_index_set;

  // Accounting by the first phase mark instead of by final writes.
  std::optional<std::uint64_t> phase_mark_tick;
  std::uint64_t reads_before_phase_mark = 0;
  std::uint64_t reads_after_phase_mark = 0;

  std::uint64_t first_pass_distinct_reads() const { return first_pass_read_index_set.size(); }
  std::uint64_t second_pass_distinct_reads() const { return second_pass_read_index_set.size(); }
};

// Partitions a trace at the earliest final write.
inline PassSplit split_passes(const ExecutionTrace& trace) {
  const std::size_t n = trace.n();
  std::vector<std::optional<std::uint64_t>> last_write(n);
  for (const auto& e : trace.events) {
    if (e.kind == EventKind::kWriteOutput) last_write[*e.index] = e.tick;
  }
  PassSplit split;
  split.boundary_tick = std::numeric_limits<std::uint64_t>::max();
  for (std::size_t i = 0; i < n; ++i) {
    if (!last_write[i]) {
      throw ModelError(ModelError::Kind::kIncompleteOutput, "output cell " + std::to_string(i) + " never written",
                       0, i);
    }
    if (*last_write[i] < split.boundary_tick) {
      split.boundary_tick = *last_write[i];
      split.boundary_cell = i;
    }
  }
  for (const auto& e : trace.events) {
    if (e.kind == EventKind::kPhaseMark && !split.phase_mark_tick) split.phase_mark_tick = e.tick;
    if (e.kind != EventKind::kReadInput) continue;
    if (e.tick < split.boundary_tick) {
      ++split.first_pass_reads;
      split.first_pass_read_index_set.insert(*e.index);
    } else {
      ++split.second_pass_reads;
      split.second_pass_read_index_set.insert(*e.index);
    }
    if (split.phase_mark_tick) {
      ++split.reads_after_phase_mark;
    } else {
      ++split.reads_before_phase_mark;
    }
  }
  if (!split.phase_mark_tick) {
    split.reads_after_phase_mark = split.reads_before_phase_mark;
    split.reads_before_phase_mark = 0;
  }
  split.second_pass_read_bits = split.second_pass_reads * trace.instance.d();
  for (std::size_t k = trace.checkpoints.size(); k-- > 0;) {
    if (trace.checkpoints[k].tick < split.boundary_tick) {
      split.boundary_checkpoint = k;
      split.boundary_state_bits = trace.checkpoints[k].state.size();
      break;
    }
  }
  return split;
}

struct Mismatch {
  std::size_t cell = 0;
  Integer expected;
  std::optional<Integer> actual;  // nullopt if the cell was never written
};

struct OutputVerdict {
  bool correct = true;
  std::vector<Mismatch> mismatches;
};

inline OutputVerdict verify_output(const InputInstance& instance, const OutputVector& output,
                                   const std::vector<bool>& written) {
  const auto truth = formulas::forward_map(instance);
  OutputVerdict v;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool has = i < written.size() && written[i];
    if (!has) {
      v.mismatches.push_back({i, truth[i], std::nullopt});
    } else if (output[i] != truth[i]) {
      v.mismatches.push_back({i, truth[i], output[i]});
    }
  }
  v.correct = v.mismatches.empty();
  return v;
}

inline OutputVerdict verify_output(const ExecutionTrace& trace) {
  return verify_output(trace.instance, trace.final_output, trace.written);
}

// Kinds and indices of tape events, values dropped.
inline std::vector<std::pair<EventKind, std::optional<std::size_t>>> operation_schedule(const ExecutionTrace& t) {
  std::vector<std::pair<EventKind, std::optional<std::size_t>>> out;
  for (const auto& e : t.events) {
    if (e.kind != EventKind::kStateSize) out.emplace_back(e.kind, e.index);
  }
  return out;
}

// True iff every input of shape (n, d) yields the same operation schedule and
// the same control register sequence. Enumerates all 2^(nd) inputs.
inline bool oblivious_control_check(const AlgorithmSpec& alg, std::size_t n, unsigned d, std::uint64_t budget_t) {
  std::optional<std::vector<std::pair<EventKind, std::optional<std::size_t>>>> reference;
  std::vector<Control> reference_controls;
  bool same = true;
  for_each_input(n, d, [&](const InputInstance& in) {
    if (!same) return;
    auto trace = execute(alg, in, budget_t);
    auto schedule = operation_schedule(trace);
    std::vector<Control> controls;
    for (const auto& c : trace.checkpoints) controls.push_back(c.control);
    if (!reference) {
      reference = std::move(schedule);
      reference_controls = std::move(controls);
    } else if (*reference != schedule || reference_controls != controls) {
      same = false;
    }
  });
  return same;
}

}  // namespace chokepoint
