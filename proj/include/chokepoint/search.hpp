#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chokepoint/bits.hpp"
#include "chokepoint/formulas.hpp"
#include "chokepoint/instance.hpp"
#include "chokepoint/model.hpp"
#include "chokepoint/parallel.hpp"

namespace chokepoint::search {

class SearchSpaceTooLarge : public EnumerationTooLarge {
 public:
  SearchSpaceTooLarge(const std::string& what, Integer estimate)
      : EnumerationTooLarge(what), estimate_(std::move(estimate)) {}
  const Integer& estimate() const { return estimate_; }

 private:
  Integer estimate_;
};

struct Caps {
  std::uint64_t max_protocols = 100'000'000;
  std::optional<std::uint64_t> max_steps;  // default 8n + 8
};

// Parameters of one protocol family: n cells, d-bit words, t bits of memory.
struct Family {
  std::size_t n = 0;
  unsigned d = 0;
  unsigned t = 0;

  std::uint64_t states() const { return std::uint64_t{1} << t; }
  std::uint64_t values() const { return std::uint64_t{1} << d; }
  // Write values range over [0, n(2^d - 1)].
  std::uint64_t write_values() const { return n * (values() - 1) + 1; }
  // T^(2^d) transition tables per read index.
  std::uint64_t transition_tables() const {
    std::uint64_t r = 1;
    for (std::uint64_t v = 0; v < values(); ++v) r *= states();
    return r;
  }
  std::uint64_t read_actions() const { return n * transition_tables(); }
  std::uint64_t write_actions() const { return n * write_values() * states(); }
  std::uint64_t actions_per_state() const { return read_actions() + write_actions() + 1; }
};

enum class ActionKind : std::uint8_t { kRead, kWrite, kHalt };

struct ProtocolAction {
  ActionKind kind = ActionKind::kHalt;
  std::uint32_t index = 0;
  std::vector<std::uint32_t> transitions;  // read: next state for each value
  std::uint64_t value = 0;                 // write
  std::uint32_t next = 0;                  // write

  friend bool operator==(const ProtocolAction&, const ProtocolAction&) = default;
};

// Decodes an action code in [0, actions_per_state()). Codes order reads
// (by index, then transition table with value 0 most significant), then
// writes (by index, value, next state), then halt.
inline ProtocolAction decode_action(const Family& f, std::uint64_t code) {
  ProtocolAction a;
  if (code < f.read_actions()) {
    a.kind = ActionKind::kRead;
    a.index = static_cast<std::uint32_t>(code / f.transition_tables());
    std::uint64_t table = code % f.transition_tables();
    a.transitions.assign(f.values(), 0);
    for (std::uint64_t v = f.values(); v-- > 0;) {
      a.transitions[v] = static_cast<std::uint32_t>(table % f.states());
      table /= f.states();
    }
    return a;
  }
  code -= f.read_actions();
  if (code < f.write_actions()) {
    a.kind = ActionKind::kWrite;
    a.index = static_cast<std::uint32_t>(code / (f.write_values() * f.states()));
    a.value = (code / f.states()) % f.write_values();
    a.next = static_cast<std::uint32_t>(code % f.states());
    return a;
  }
  return a;
}

inline std::uint64_t encode_action(const Family& f, const ProtocolAction& a) {
  switch (a.kind) {
    case ActionKind::kRead: {
      std::uint64_t table = 0;
      for (auto s : a.transitions) table = table * f.states() + s;
      return a.index * f.transition_tables() + table;
    }
    case ActionKind::kWrite:
      return f.read_actions() + (a.index * f.write_values() + a.value) * f.states() + a.next;
    case ActionKind::kHalt:
      break;
  }
  return f.actions_per_state() - 1;
}

// A deterministic t-bit memory algorithm as a per-state action table. State 0
// is initial. Unassigned entries (states unreachable from state 0) act as halt.
struct Protocol {
  Family family;
  std::vector<std::optional<ProtocolAction>> table;

  const ProtocolAction* action(std::uint32_t s) const { return table[s] ? &*table[s] : nullptr; }
};

enum class Outcome { kCorrect, kIncorrect, kDiverged };

inline const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::kCorrect: return "correct";
    case Outcome::kIncorrect: return "incorrect";
    case Outcome::kDiverged: return "diverged";
  }
  return "?";
}

struct Verdict {
  Outcome outcome = Outcome::kIncorrect;
  // For correct protocols: worst-case reads over inputs, and the fewest
  // distinct positions read before the earliest final write on any input.
  std::uint64_t total_reads = 0;
  std::uint64_t first_pass_reads = 0;
};

namespace detail {

// Flattened protocol for simulation.
struct Compiled {
  std::vector<ActionKind> kind;
  std::vector<std::uint32_t> index;
  std::vector<std::uint32_t> next;            // write successor
  std::vector<std::uint64_t> value;           // write value
  std::vector<std::uint32_t> transitions;     // states * values
};

inline Compiled compile(const Protocol& p) {
  const auto& f = p.family;
  Compiled c;
  const auto states = f.states();
  c.kind.assign(states, ActionKind::kHalt);
  c.index.assign(states, 0);
  c.next.assign(states, 0);
  c.value.assign(states, 0);
  c.transitions.assign(states * f.values(), 0);
  for (std::uint32_t s = 0; s < states; ++s) {
    const auto* a = p.action(s);
    if (!a) continue;
    c.kind[s] = a->kind;
    c.index[s] = a->index;
    c.next[s] = a->next;
    c.value[s] = a->value;
    for (std::uint64_t v = 0; v < a->transitions.size(); ++v) c.transitions[s * f.values() + v] = a->transitions[v];
  }
  return c;
}

// Inputs of the family with their true outputs, precomputed once per search.
struct InputTable {
  std::vector<std::vector<std::uint64_t>> inputs;
  std::vector<std::vector<std::uint64_t>> truth;
};

inline InputTable make_inputs(const Family& f) {
  InputTable t;
  for_each_input(f.n, f.d, [&](const InputInstance& in) {
    t.inputs.emplace_back(in.values().begin(), in.values().end());
    std::vector<std::uint64_t> out;
    for (const auto& v : formulas::forward_map(in)) out.push_back(static_cast<std::uint64_t>(v));
    t.truth.push_back(std::move(out));
  });
  return t;
}

inline Verdict simulate(const Family& f, const Compiled& c, const InputTable& inputs, std::uint64_t max_steps) {
  Verdict verdict;
  verdict.outcome = Outcome::kCorrect;
  verdict.first_pass_reads = std::numeric_limits<std::uint64_t>::max();
  const std::size_t n = f.n;
  constexpr std::uint64_t kNever = std::numeric_limits<std::uint64_t>::max();
  std::vector<std::uint64_t> out(n), last_write(n);
  std::vector<std::pair<std::uint64_t, std::uint32_t>> reads;
  for (std::size_t k = 0; k < inputs.inputs.size(); ++k) {
    const auto& in = inputs.inputs[k];
    std::fill(last_write.begin(), last_write.end(), kNever);
    reads.clear();
    std::uint32_t s = 0;
    std::uint64_t step = 0;
    for (;;) {
      const ActionKind kind = c.kind[s];
      if (kind == ActionKind::kHalt) break;
      if (step == max_steps) return {Outcome::kDiverged, 0, 0};
      if (kind == ActionKind::kRead) {
        const auto i = c.index[s];
        reads.emplace_back(step, i);
        s = c.transitions[s * f.values() + in[i]];
      } else {
        const auto i = c.index[s];
        out[i] = c.value[s];
        last_write[i] = step;
        s = c.next[s];
      }
      ++step;
    }
    std::uint64_t boundary = kNever;
    for (std::size_t i = 0; i < n; ++i) {
      if (last_write[i] == kNever || out[i] != inputs.truth[k][i]) return {Outcome::kIncorrect, 0, 0};
      boundary = std::min(boundary, last_write[i]);
    }
    std::uint64_t seen = 0;
    for (const auto& [at, i] : reads) {
      if (at < boundary) seen |= std::uint64_t{1} << i;
    }
    verdict.total_reads = std::max<std::uint64_t>(verdict.total_reads, reads.size());
    verdict.first_pass_reads = std::min<std::uint64_t>(verdict.first_pass_reads, std::popcount(seen));
  }
  return verdict;
}

// Refills `c` from raw action codes (-1 = unassigned) without materializing.
inline void compile_codes(const Family& f, const std::vector<std::int64_t>& codes, Compiled& c) {
  const auto states = f.states();
  c.kind.assign(states, ActionKind::kHalt);
  c.index.resize(states);
  c.next.resize(states);
  c.value.resize(states);
  c.transitions.resize(states * f.values());
  for (std::uint32_t s = 0; s < states; ++s) {
    if (codes[s] < 0) continue;
    auto code = static_cast<std::uint64_t>(codes[s]);
    if (code < f.read_actions()) {
      c.kind[s] = ActionKind::kRead;
      c.index[s] = static_cast<std::uint32_t>(code / f.transition_tables());
      std::uint64_t table = code % f.transition_tables();
      for (std::uint64_t v = f.values(); v-- > 0;) {
        c.transitions[s * f.values() + v] = static_cast<std::uint32_t>(table % states);
        table /= states;
      }
      continue;
    }
    code -= f.read_actions();
    if (code < f.write_actions()) {
      c.kind[s] = ActionKind::kWrite;
      c.index[s] = static_cast<std::uint32_t>(code / (f.write_values() * states));
      c.value[s] = (code / states) % f.write_values();
      c.next[s] = static_cast<std::uint32_t>(code % states);
    }
  }
}

inline void check_family(const Family& f) {
  if (f.n < 1 || f.n > 64 || f.d < 1 || f.n * f.d > 16 || f.t > 5) {
    throw std::invalid_argument("search: supported range is 1 <= n <= 64, d >= 1, nd <= 16, t <= 5");
  }
}

}  // namespace detail

inline Verdict check_protocol(const Protocol& p, const Caps& caps = {}) {
  detail::check_family(p.family);
  const auto inputs = detail::make_inputs(p.family);
  return detail::simulate(p.family, detail::compile(p), inputs,
                          caps.max_steps.value_or(default_max_steps(p.family.n)));
}

// Full table count (actions per state)^(2^t).
inline Integer protocol_count(const Family& f) {
  Integer total = 1;
  for (std::uint64_t s = 0; s < f.states(); ++s) total *= f.actions_per_state();
  return total;
}

inline void check_feasible(const Family& f, const Caps& caps) {
  detail::check_family(f);
  const Integer estimate = protocol_count(f);
  if (estimate > caps.max_protocols) {
    throw SearchSpaceTooLarge("search space of " + estimate.str() + " protocols exceeds the cap of " +
                                  std::to_string(caps.max_protocols),
                              estimate);
  }
}

struct EnumerationSummary {
  // Distinct canonical tables visited.
  std::uint64_t canonical = 0;
  // Full tables they stand for, counting every assignment of unreachable states.
  std::uint64_t represented = 0;
};

namespace detail {

// Depth-first over tables that assign actions only to states reachable from
// state 0, always extending the smallest reachable unassigned state.
template <typename Visit>
void extend(const Family& f, std::vector<std::int64_t>& codes, std::uint64_t reachable, std::uint64_t assigned,
            Visit& visit) {
  const std::uint64_t open = reachable & ~assigned;
  if (open == 0) {
    visit(codes, static_cast<unsigned>(std::popcount(assigned)));
    return;
  }
  const auto s = static_cast<unsigned>(std::countr_zero(open));
  const std::uint64_t actions = f.actions_per_state();
  for (std::uint64_t code = 0; code < actions; ++code) {
    std::uint64_t next_reachable = reachable;
    if (code < f.read_actions()) {
      std::uint64_t table = code % f.transition_tables();
      for (std::uint64_t v = 0; v < f.values(); ++v) {
        next_reachable |= std::uint64_t{1} << (table % f.states());
        table /= f.states();
      }
    } else if (code < f.read_actions() + f.write_actions()) {
      next_reachable |= std::uint64_t{1} << ((code - f.read_actions()) % f.states());
    }
    codes[s] = static_cast<std::int64_t>(code);
    extend(f, codes, next_reachable, assigned | (std::uint64_t{1} << s), visit);
  }
  codes[s] = -1;
}

inline std::uint64_t power(std::uint64_t base, unsigned exp) {
  std::uint64_t r = 1;
  while (exp-- > 0) r *= base;
  return r;
}

inline Protocol materialize(const Family& f, const std::vector<std::int64_t>& codes) {
  Protocol p{f, {}};
  p.table.resize(f.states());
  for (std::size_t s = 0; s < codes.size(); ++s) {
    if (codes[s] >= 0) p.table[s] = decode_action(f, static_cast<std::uint64_t>(codes[s]));
  }
  return p;
}

}  // namespace detail

// Calls visit(protocol, multiplicity) once per canonical table, in
// lexicographic order of the action codes along the assignment order.
// `multiplicity` is the number of full tables that agree on every reachable
// state; the multiplicities sum to protocol_count().
inline EnumerationSummary enumerate_protocols(const Family& f, const Caps& caps,
                                              const std::function<void(const Protocol&, std::uint64_t)>& visit) {
  check_feasible(f, caps);
  EnumerationSummary summary;
  const std::uint64_t actions = f.actions_per_state();
  const auto states = static_cast<unsigned>(f.states());
  std::vector<std::int64_t> codes(states, -1);
  auto on_table = [&](const std::vector<std::int64_t>& c, unsigned assigned) {
    const std::uint64_t weight = detail::power(actions, states - assigned);
    ++summary.canonical;
    summary.represented += weight;
    visit(detail::materialize(f, c), weight);
  };
  detail::extend(f, codes, 1, 0, on_table);
  return summary;
}

struct MinReadsReport {
  std::size_t n = 0;
  unsigned d = 0;
  unsigned t = 0;
  std::uint64_t protocols_enumerated = 0;  // full tables covered
  std::uint64_t canonical_protocols = 0;   // tables actually simulated
  std::uint64_t correct_protocols = 0;     // canonical
  std::uint64_t diverged_protocols = 0;    // canonical
  std::optional<std::uint64_t> min_total_reads;
  std::optional<std::uint64_t> min_first_pass_reads;
  std::int64_t bound_total = 0;
  std::int64_t bound_first_pass = 0;
  bool bound_respected = true;
  bool first_pass_bound_respected = true;
  std::optional<Protocol> witness;  // a correct protocol attaining min_total_reads
};

namespace detail {

struct Tally {
  std::uint64_t canonical = 0;
  std::uint64_t represented = 0;
  std::uint64_t correct = 0;
  std::uint64_t diverged = 0;
  std::optional<std::uint64_t> min_total;
  std::optional<std::uint64_t> min_first;
  std::optional<std::vector<std::int64_t>> witness;
};

}  // namespace detail

// Exhaustive minimum read count over all protocols of the family. Shards on
// the action of state 0; shards merge in code order so results do not depend
// on the thread count.
inline MinReadsReport min_reads(std::size_t n, unsigned d, unsigned t, const Caps& caps = {}) {
  const Family f{n, d, t};
  check_feasible(f, caps);
  const auto inputs = detail::make_inputs(f);
  const std::uint64_t max_steps = caps.max_steps.value_or(default_max_steps(n));
  const std::uint64_t actions = f.actions_per_state();
  const auto states = static_cast<unsigned>(f.states());

  std::vector<detail::Tally> shards(actions);
  parallel_for(actions, [&](std::size_t first) {
    auto& tally = shards[first];
    std::vector<std::int64_t> codes(states, -1);
    codes[0] = static_cast<std::int64_t>(first);
    std::uint64_t reachable = 1;
    if (first < f.read_actions()) {
      std::uint64_t table = first % f.transition_tables();
      for (std::uint64_t v = 0; v < f.values(); ++v) {
        reachable |= std::uint64_t{1} << (table % f.states());
        table /= f.states();
      }
    } else if (first < f.read_actions() + f.write_actions()) {
      reachable |= std::uint64_t{1} << ((first - f.read_actions()) % f.states());
    }
    detail::Compiled compiled;
    auto visit = [&](const std::vector<std::int64_t>& c, unsigned assigned) {
      ++tally.canonical;
      tally.represented += detail::power(actions, states - assigned);
      detail::compile_codes(f, c, compiled);
      const auto v = detail::simulate(f, compiled, inputs, max_steps);
      if (v.outcome == Outcome::kDiverged) ++tally.diverged;
      if (v.outcome != Outcome::kCorrect) return;
      ++tally.correct;
      if (!tally.min_total || v.total_reads < *tally.min_total) {
        tally.min_total = v.total_reads;
        tally.witness = c;
      }
      if (!tally.min_first || v.first_pass_reads < *tally.min_first) tally.min_first = v.first_pass_reads;
    };
    detail::extend(f, codes, reachable, 1, visit);
  });

  MinReadsReport r;
  r.n = n;
  r.d = d;
  r.t = t;
  r.bound_total = formulas::total_bound(static_cast<std::int64_t>(n), d, t);
  r.bound_first_pass = formulas::first_pass_bound(static_cast<std::int64_t>(n));
  for (const auto& s : shards) {
    r.protocols_enumerated += s.represented;
    r.canonical_protocols += s.canonical;
    r.correct_protocols += s.correct;
    r.diverged_protocols += s.diverged;
    if (s.min_total && (!r.min_total_reads || *s.min_total < *r.min_total_reads)) {
      r.min_total_reads = s.min_total;
      r.witness = detail::materialize(f, *s.witness);
    }
    if (s.min_first && (!r.min_first_pass_reads || *s.min_first < *r.min_first_pass_reads)) {
      r.min_first_pass_reads = s.min_first;
    }
  }
  r.bound_respected =
      !r.min_total_reads || static_cast<std::int64_t>(*r.min_total_reads) >= std::max<std::int64_t>(r.bound_total, 0);
  r.first_pass_bound_respected =
      !r.min_first_pass_reads || static_cast<std::int64_t>(*r.min_first_pass_reads) >= r.bound_first_pass;
  return r;
}

// A protocol as an adaptive model algorithm: all state is counted, t bits.
struct ProtocolMachine {
  Protocol protocol;

  struct State {
    std::uint32_t s = 0;
  };

  std::string name() const { return "protocol"; }
  bool oblivious() const { return false; }
  void check_shape(Shape shape) const {
    if (shape.n != protocol.family.n || shape.d != protocol.family.d) {
      throw std::invalid_argument("protocol: shape does not match the protocol family");
    }
  }
  State init(Shape) const { return {}; }

  Action next(Shape, Control&, State& st) const {
    const auto* a = protocol.action(st.s);
    if (!a || a->kind == ActionKind::kHalt) return Halt{};
    if (a->kind == ActionKind::kRead) return ReadInput{a->index};
    st.s = a->next;
    return WriteOutput{a->index, Integer(a->value)};
  }

  void absorb(Shape, Control&, State& st, Word w) const {
    st.s = protocol.action(st.s)->transitions[w.value()];
  }

  void save(Shape, const Control&, const State& st, BitWriter& w) const { w.put(std::uint64_t{st.s}, protocol.family.t); }
  State load(Shape, const Control&, BitReader& r) const {
    return {static_cast<std::uint32_t>(r.get_u64(protocol.family.t))};
  }
};

inline AlgorithmSpec as_algorithm(Protocol p) { return make_algorithm(ProtocolMachine{std::move(p)}); }

}  // namespace chokepoint::search
