#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "chokepoint/adversary.hpp"
#include "chokepoint/audit.hpp"
#include "chokepoint/formulas.hpp"
#include "chokepoint/model.hpp"
#include "chokepoint/search.hpp"

namespace chokepoint::io {

using nlohmann::json;

// Integers that fit in int64 are JSON numbers; larger ones are decimal strings.
inline json integer_to_json(const Integer& v) {
  if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max()) {
    return static_cast<std::int64_t>(v);
  }
  return v.str();
}

inline Integer integer_from_json(const json& j) {
  if (j.is_number_unsigned()) return Integer(j.get<std::uint64_t>());
  if (j.is_number_integer()) return Integer(j.get<std::int64_t>());
  if (j.is_string()) return Integer(j.get<std::string>());
  throw std::invalid_argument("expected an integer, got " + j.dump());
}

inline json integers_to_json(const std::vector<Integer>& values) {
  json a = json::array();
  for (const auto& v : values) a.push_back(integer_to_json(v));
  return a;
}

inline json input_to_json(const InputInstance& in) {
  json a = json::array();
  for (auto v : in.values()) a.push_back(v);
  return a;
}

// The exported trace: exactly the fields n, d, t, events, output, max_state_bits.
struct TraceRecord {
  std::size_t n = 0;
  unsigned d = 0;
  std::uint64_t t = 0;
  std::vector<TraceEvent> events;
  OutputVector output;
  std::uint64_t max_state_bits = 0;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

inline TraceRecord record_of(const ExecutionTrace& trace) {
  return {trace.n(), trace.instance.d(), trace.declared_budget_t, trace.events, trace.final_output,
          trace.max_counted_state_bits};
}

inline json to_json(const TraceEvent& e) {
  json j;
  j["tick"] = e.tick;
  j["kind"] = to_string(e.kind);
  j["index"] = e.index ? json(*e.index) : json(nullptr);
  if (e.kind == EventKind::kPhaseMark) {
    j["value"] = e.label;
  } else {
    j["value"] = integer_to_json(e.value);
  }
  return j;
}

inline TraceEvent event_from_json(const json& j) {
  TraceEvent e;
  e.tick = j.at("tick").get<std::uint64_t>();
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "read") {
    e.kind = EventKind::kReadInput;
  } else if (kind == "write") {
    e.kind = EventKind::kWriteOutput;
  } else if (kind == "phase") {
    e.kind = EventKind::kPhaseMark;
  } else if (kind == "state") {
    e.kind = EventKind::kStateSize;
  } else {
    throw std::invalid_argument("unknown event kind '" + kind + "'");
  }
  if (!j.at("index").is_null()) e.index = j.at("index").get<std::size_t>();
  if (e.kind == EventKind::kPhaseMark) {
    e.label = j.at("value").get<std::string>();
  } else {
    e.value = integer_from_json(j.at("value"));
  }
  return e;
}

inline json to_json(const TraceRecord& r) {
  json j;
  j["n"] = r.n;
  j["d"] = r.d;
  j["t"] = r.t;
  j["events"] = json::array();
  for (const auto& e : r.events) j["events"].push_back(to_json(e));
  j["output"] = integers_to_json(r.output);
  j["max_state_bits"] = r.max_state_bits;
  return j;
}

inline json to_json(const ExecutionTrace& trace) { return to_json(record_of(trace)); }

inline TraceRecord trace_from_json(const json& j) {
  TraceRecord r;
  r.n = j.at("n").get<std::size_t>();
  r.d = j.at("d").get<unsigned>();
  r.t = j.at("t").get<std::uint64_t>();
  for (const auto& e : j.at("events")) r.events.push_back(event_from_json(e));
  for (const auto& v : j.at("output")) r.output.push_back(integer_from_json(v));
  r.max_state_bits = j.at("max_state_bits").get<std::uint64_t>();
  return r;
}

inline json to_json(const PassSplit& s) {
  json j;
  j["boundary_tick"] = s.boundary_tick;
  j["boundary_cell"] = s.boundary_cell;
  j["first_pass_reads"] = s.first_pass_reads;
  j["second_pass_reads"] = s.second_pass_reads;
  j["first_pass_distinct_reads"] = s.first_pass_distinct_reads();
  j["second_pass_distinct_reads"] = s.second_pass_distinct_reads();
  j["second_pass_read_bits"] = s.second_pass_read_bits;
  j["boundary_state_bits"] = s.boundary_state_bits;
  j["first_pass_read_index_set"] = s.first_pass_read_index_set;
  if (s.phase_mark_tick) {
    j["phase_mark_tick"] = *s.phase_mark_tick;
    j["reads_before_phase_mark"] = s.reads_before_phase_mark;
    j["reads_after_phase_mark"] = s.reads_after_phase_mark;
  } else {
    j["phase_mark_tick"] = nullptr;
  }
  return j;
}

inline json to_json(const OutputVerdict& v) {
  json j;
  j["correct"] = v.correct;
  j["mismatches"] = json::array();
  for (const auto& m : v.mismatches) {
    j["mismatches"].push_back({{"cell", m.cell},
                               {"expected", integer_to_json(m.expected)},
                               {"actual", m.actual ? integer_to_json(*m.actual) : json(nullptr)}});
  }
  return j;
}

inline json to_json(const adversary::Counterexample& c) {
  json j;
  j["base_input"] = input_to_json(c.base_input);
  j["perturbed_input"] = input_to_json(c.perturbed_input);
  j["perturbed_index"] = c.perturbed_index;
  j["affected_output_index"] = c.affected_output_index;
  j["base_output_value"] = integer_to_json(c.base_output_value);
  j["perturbed_output_value"] = integer_to_json(c.perturbed_output_value);
  j["true_value_on_perturbed"] = integer_to_json(c.true_value_on_perturbed);
  j["degenerate"] = c.degenerate;
  return j;
}

inline adversary::Counterexample counterexample_from_json(const json& j, unsigned d) {
  auto input = [&](const json& a) { return InputInstance(d, a.get<std::vector<std::uint64_t>>()); };
  return {input(j.at("base_input")),
          input(j.at("perturbed_input")),
          j.at("perturbed_index").get<std::size_t>(),
          j.at("affected_output_index").get<std::size_t>(),
          integer_from_json(j.at("base_output_value")),
          integer_from_json(j.at("perturbed_output_value")),
          integer_from_json(j.at("true_value_on_perturbed")),
          j.at("degenerate").get<bool>()};
}

inline json to_json(const adversary::FirstPassReport& r) {
  json j;
  j["n"] = r.n;
  j["d"] = r.d;
  j["inputs_checked"] = r.inputs_checked;
  j["min_first_pass_distinct_reads"] = r.min_first_pass_distinct_reads;
  j["min_first_pass_reads"] = r.min_first_pass_reads;
  j["bound"] = r.bound;
  j["holds"] = r.holds;
  j["violating_input"] = r.violating_input ? input_to_json(*r.violating_input) : json(nullptr);
  return j;
}

inline json to_json(const audit::AuditReport& r) {
  json j;
  j["algorithm"] = r.algorithm;
  j["n"] = r.n;
  j["d"] = r.d;
  j["inputs"] = r.inputs;
  j["t_state_bits"] = r.t_state_bits;
  j["u_max"] = r.u_max;
  j["distinct_pairs"] = r.distinct_pairs;
  j["injective"] = r.injective;
  j["bit_inequality_holds"] = r.bit_inequality_holds;
  j["round_trips"] = r.round_trips;
  if (!r.pairs.empty()) {
    j["pairs"] = json::array();
    for (const auto& p : r.pairs) {
      j["pairs"].push_back({{"input", input_to_json(p.input)},
                            {"state_hex", p.pair.state.to_hex()},
                            {"state_bits", p.pair.state.size()},
                            {"transcript_hex", p.pair.transcript.to_hex()},
                            {"transcript_bits", p.pair.transcript.size()}});
    }
  }
  return j;
}

inline json to_json(const search::ProtocolAction& a) {
  switch (a.kind) {
    case search::ActionKind::kRead:
      return {{"action", "read"}, {"index", a.index}, {"transitions", a.transitions}};
    case search::ActionKind::kWrite:
      return {{"action", "write"}, {"index", a.index}, {"value", a.value}, {"next", a.next}};
    case search::ActionKind::kHalt:
      break;
  }
  return {{"action", "halt"}};
}

inline json to_json(const search::Protocol& p) {
  json j;
  j["n"] = p.family.n;
  j["d"] = p.family.d;
  j["t"] = p.family.t;
  j["table"] = json::array();
  for (const auto& a : p.table) j["table"].push_back(a ? to_json(*a) : json(nullptr));
  return j;
}

inline search::Protocol protocol_from_json(const json& j) {
  search::Protocol p;
  p.family = {j.at("n").get<std::size_t>(), j.at("d").get<unsigned>(), j.at("t").get<unsigned>()};
  for (const auto& e : j.at("table")) {
    if (e.is_null()) {
      p.table.emplace_back();
      continue;
    }
    search::ProtocolAction a;
    const auto kind = e.at("action").get<std::string>();
    if (kind == "read") {
      a.kind = search::ActionKind::kRead;
      a.index = e.at("index").get<std::uint32_t>();
      a.transitions = e.at("transitions").get<std::vector<std::uint32_t>>();
    } else if (kind == "write") {
      a.kind = search::ActionKind::kWrite;
      a.index = e.at("index").get<std::uint32_t>();
      a.value = e.at("value").get<std::uint64_t>();
      a.next = e.at("next").get<std::uint32_t>();
    } else if (kind != "halt") {
      throw std::invalid_argument("unknown protocol action '" + kind + "'");
    }
    p.table.push_back(std::move(a));
  }
  if (p.table.size() != p.family.states()) throw std::invalid_argument("protocol table must have 2^t entries");
  return p;
}

template <typename T>
json optional_to_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

inline json to_json(const search::MinReadsReport& r) {
  json j;
  j["n"] = r.n;
  j["d"] = r.d;
  j["t"] = r.t;
  j["protocols_enumerated"] = r.protocols_enumerated;
  j["canonical_protocols"] = r.canonical_protocols;
  j["correct_protocols"] = r.correct_protocols;
  j["diverged_protocols"] = r.diverged_protocols;
  j["min_total_reads"] = optional_to_json(r.min_total_reads);
  j["min_first_pass_reads"] = optional_to_json(r.min_first_pass_reads);
  j["bound_total"] = r.bound_total;
  j["bound_first_pass"] = r.bound_first_pass;
  j["bound_respected"] = r.bound_respected;
  j["first_pass_bound_respected"] = r.first_pass_bound_respected;
  j["witness"] = r.witness ? to_json(*r.witness) : json(nullptr);
  return j;
}

inline const char* min_reads_csv_header() {
  return "n,d,t,protocols_enumerated,canonical_protocols,correct_protocols,diverged_protocols,min_total_reads,"
         "min_first_pass_reads,bound_total,bound_first_pass,bound_respected,first_pass_bound_respected";
}

inline std::string to_csv(const search::MinReadsReport& r) {
  auto opt = [](const std::optional<std::uint64_t>& v) { return v ? std::to_string(*v) : std::string(); };
  return std::to_string(r.n) + "," + std::to_string(r.d) + "," + std::to_string(r.t) + "," +
         std::to_string(r.protocols_enumerated) + "," + std::to_string(r.canonical_protocols) + "," +
         std::to_string(r.correct_protocols) + "," + std::to_string(r.diverged_protocols) + "," +
         opt(r.min_total_reads) + "," + opt(r.min_first_pass_reads) + "," + std::to_string(r.bound_total) + "," +
         std::to_string(r.bound_first_pass) + "," + (r.bound_respected ? "true" : "false") + "," +
         (r.first_pass_bound_respected ? "true" : "false");
}

inline json to_json(const formulas::BoundsReport& r) {
  return {{"n", r.n},
          {"d", r.d},
          {"t", r.t},
          {"first_pass_bound", r.first_pass_bound},
          {"second_pass_bound_raw", r.second_pass_bound_raw},
          {"second_pass_bound", r.second_pass_bound_clamped()},
          {"total_bound", r.total_bound},
          {"standard_memory_bits", r.standard_memory_bits},
          {"read_gap", r.read_gap},
          {"standard_reads", r.standard_reads},
          {"optimized_reads", r.optimized_reads},
          {"standard_gap", r.standard_gap},
          {"optimized_gap", r.optimized_gap},
          {"optimized_total_gap", r.optimized_total_gap}};
}

}  // namespace chokepoint::io
