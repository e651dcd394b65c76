// chokepoint: command-line driver for the sum-exclude-self space-bounded
// computation lab. Subcommands: run, bounds, falsify, audit, search,
// reconstruct.
//
// Exit codes: 0 all checked properties hold, 1 violation or refusal,
// 2 usage error, 3 enumeration guard tripped.

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chokepoint/chokepoint.hpp"

namespace {

using namespace chokepoint;
using nlohmann::json;

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kUsage = 2;
constexpr int kGuard = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string tok; std::getline(ss, tok, ',');) {
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

std::uint64_t parse_u64(const std::string& tok) {
  if (auto caret = tok.find('^'); caret != std::string::npos) {
    if (tok.substr(0, caret) != "2") throw UsageError("only powers of two are accepted in '" + tok + "'");
    const auto e = parse_u64(tok.substr(caret + 1));
    if (e > 62) throw UsageError("exponent too large in '" + tok + "'");
    return std::uint64_t{1} << e;
  }
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(tok, &used);
  } catch (const std::exception&) {
    throw UsageError("not a nonnegative integer: '" + tok + "'");
  }
  if (used != tok.size() || tok.front() == '-') throw UsageError("not a nonnegative integer: '" + tok + "'");
  return v;
}

// Comma-separated list of integers, 2^k powers, or lo..hi ranges.
std::vector<std::uint64_t> parse_grid(const std::string& s) {
  std::vector<std::uint64_t> out;
  for (const auto& tok : split_commas(s)) {
    if (auto dots = tok.find(".."); dots != std::string::npos) {
      const auto lo = parse_u64(tok.substr(0, dots));
      const auto hi = parse_u64(tok.substr(dots + 2));
      if (hi < lo || hi - lo > 100000) throw UsageError("bad range '" + tok + "'");
      for (auto v = lo; v <= hi; ++v) out.push_back(v);
    } else {
      out.push_back(parse_u64(tok));
    }
  }
  return out;
}

std::vector<Integer> parse_integers(const std::string& s) {
  std::vector<Integer> out;
  for (const auto& tok : split_commas(s)) {
    try {
      out.emplace_back(tok);
    } catch (const std::exception&) {
      throw UsageError("not an integer: '" + tok + "'");
    }
  }
  return out;
}

struct Options {
  std::string alg;
  std::string n;
  std::string d;
  std::string t;
  bool auto_t = false;
  std::string input;
  std::optional<std::uint64_t> seed;
  std::string format = "json";
  std::optional<std::uint64_t> max_steps;
  std::uint64_t max_protocols = search::Caps{}.max_protocols;
  bool dump_pairs = false;
};

std::uint64_t scalar(const std::string& value, const char* flag, std::optional<std::uint64_t> fallback = {}) {
  if (value.empty()) {
    if (fallback) return *fallback;
    throw UsageError(std::string("missing --") + flag);
  }
  const auto grid = parse_grid(value);
  if (grid.size() != 1) throw UsageError(std::string("--") + flag + " takes a single value here");
  return grid.front();
}

unsigned word_bits(const Options& o) {
  const auto d = scalar(o.d, "d");
  if (d < 1 || d > 64) throw UsageError("--d must be in [1, 64]");
  return static_cast<unsigned>(d);
}

std::uint64_t budget(const Options& o) {
  const auto t = scalar(o.t, "t", 64);
  if (t < 1) throw UsageError("--t must be >= 1 for executions");
  return t;
}

AlgorithmSpec algorithm(const Options& o) {
  if (o.alg.empty()) throw UsageError("missing --alg");
  try {
    return algorithms::by_name(o.alg);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

bool declared_incorrect(const Options& o) { return o.alg.starts_with("cheat:"); }

InputInstance instance(const Options& o) {
  const unsigned d = word_bits(o);
  if (!o.input.empty()) {
    std::vector<std::uint64_t> values;
    for (const auto& tok : split_commas(o.input)) values.push_back(parse_u64(tok));
    if (!o.n.empty() && scalar(o.n, "n") != values.size()) throw UsageError("--input length differs from --n");
    try {
      return InputInstance(d, std::move(values));
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
  }
  if (!o.seed) throw UsageError("give --input or --n with --seed");
  const auto n = scalar(o.n, "n");
  if (n < 1) throw UsageError("--n must be >= 1");
  return random_instance(n, d, *o.seed);
}

int cmd_run(const Options& o) {
  const auto alg = algorithm(o);
  const auto in = instance(o);
  try {
    alg->check_shape({in.n(), in.d()});
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto trace = execute(alg, in, budget(o), o.max_steps);
  std::cout << io::to_json(trace).dump() << "\n";
  json extra;
  const auto verdict = verify_output(trace);
  extra["algorithm"] = alg->name();
  extra["verdict"] = io::to_json(verdict);
  std::optional<PassSplit> split;
  try {
    split = split_passes(trace);
    extra["split"] = io::to_json(*split);
  } catch (const ModelError&) {
    extra["split"] = nullptr;
  }
  extra["distinct_reads"] = trace.distinct_read_count();
  std::cout << extra.dump() << "\n";
  std::cout << "reads=" << trace.read_count() << " first_pass=" << (split ? split->first_pass_reads : 0)
            << " second_pass=" << (split ? split->second_pass_reads : 0)
            << " max_state_bits=" << trace.max_counted_state_bits << "\n";
  std::cout << "correct=" << (verdict.correct ? "true" : "false") << "\n";
  return kOk;
}

int cmd_bounds(const Options& o) {
  const auto ns = parse_grid(o.n);
  const auto ds = parse_grid(o.d);
  const auto ts = parse_grid(o.t);
  if (ns.empty() || ds.empty() || (ts.empty() && !o.auto_t)) throw UsageError("bounds needs nonempty --n, --d and --t (or --auto-t)");
  std::vector<formulas::BoundsReport> rows;
  for (auto n : ns) {
    for (auto d : ds) {
      if (n < 1 || d < 1) throw UsageError("bounds needs n >= 1 and d >= 1");
      const auto nn = static_cast<std::int64_t>(n);
      const auto dd = static_cast<std::int64_t>(d);
      for (auto t : ts) rows.push_back(formulas::bounds_report(nn, dd, static_cast<std::int64_t>(t)));
      if (o.auto_t) rows.push_back(formulas::bounds_report(nn, dd, formulas::standard_memory_bits(n, dd)));
    }
  }
  if (o.format == "csv") {
    std::cout << formulas::bounds_csv_header() << "\n";
    for (const auto& r : rows) std::cout << formulas::to_csv(r) << "\n";
  } else {
    json a = json::array();
    for (const auto& r : rows) a.push_back(io::to_json(r));
    std::cout << a.dump() << "\n";
  }
  return kOk;
}

int cmd_falsify(const Options& o) {
  const auto alg = algorithm(o);
  const auto t = budget(o);
  json out;
  out["algorithm"] = alg->name();
  std::optional<adversary::Counterexample> cex;
  std::size_t n = 0;
  unsigned d = word_bits(o);
  if (!o.input.empty()) {
    const auto base = instance(o);
    n = base.n();
    if (n < 2) throw UsageError("falsify needs n >= 2");
    alg->check_shape({n, d});
    cex = adversary::find_counterexample(alg, base, t);
  } else {
    n = scalar(o.n, "n");
    if (n < 2) throw UsageError("falsify needs n >= 2");
    try {
      alg->check_shape({n, d});
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    cex = adversary::falsify(alg, n, d, t);
  }
  out["n"] = n;
  out["d"] = d;
  out["counterexample"] = cex ? io::to_json(*cex) : json(nullptr);
  bool ok = true;
  if (cex) {
    const bool replayed = adversary::replay(alg, *cex, t);
    out["replayed"] = replayed;
    ok = declared_incorrect(o) && replayed;
  } else {
    ok = !declared_incorrect(o);
  }
  if (!declared_incorrect(o) && o.input.empty()) {
    const auto report = adversary::verify_first_pass_bound(alg, n, d, t);
    out["first_pass"] = io::to_json(report);
    ok = ok && report.holds;
  }
  std::cout << out.dump() << "\n";
  return ok ? kOk : kViolation;
}

int cmd_audit(const Options& o) {
  const auto alg = algorithm(o);
  const auto n = scalar(o.n, "n");
  const auto d = word_bits(o);
  if (n < 2) throw UsageError("audit needs n >= 2");
  try {
    alg->check_shape({n, d});
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  try {
    const auto report = audit::chokepoint_audit(alg, n, d, budget(o), o.dump_pairs);
    std::cout << io::to_json(report).dump() << "\n";
    const bool ok = report.injective && report.bit_inequality_holds && report.round_trips == report.inputs;
    return ok ? kOk : kViolation;
  } catch (const PreconditionFailed& e) {
    std::cout << json{{"algorithm", alg->name()}, {"refused", true}, {"reason", e.what()}}.dump() << "\n";
    return kViolation;
  }
}

int cmd_search(const Options& o) {
  const auto n = scalar(o.n, "n");
  const auto d = word_bits(o);
  const auto t = scalar(o.t, "t");
  search::Caps caps;
  caps.max_protocols = o.max_protocols;
  caps.max_steps = o.max_steps;
  if (n < 1 || t > 5) throw UsageError("search needs n >= 1 and t <= 5");
  search::MinReadsReport report;
  try {
    report = search::min_reads(n, d, static_cast<unsigned>(t), caps);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (o.format == "csv") {
    std::cout << io::min_reads_csv_header() << "\n" << io::to_csv(report) << "\n";
  } else {
    std::cout << io::to_json(report).dump() << "\n";
  }
  return report.bound_respected && report.first_pass_bound_respected ? kOk : kViolation;
}

int cmd_reconstruct(const Options& o) {
  if (o.input.empty()) throw UsageError("reconstruct needs --input (an output vector)");
  const auto out = parse_integers(o.input);
  if (out.size() < 2) throw UsageError("reconstruct needs at least two output values");
  std::optional<unsigned> d;
  if (!o.d.empty()) d = word_bits(o);
  json j;
  j["output"] = io::integers_to_json(out);
  try {
    j["input"] = io::integers_to_json(formulas::reconstruct(out, d));
    std::cout << j.dump() << "\n";
    return kOk;
  } catch (const formulas::ReconstructError& e) {
    j["error"] = e.kind() == formulas::ReconstructError::Kind::kNotDivisible ? "NotDivisible" : "OutOfDomain";
    j["reason"] = e.what();
    std::cout << j.dump() << "\n";
    return kViolation;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sum-exclude-self under read-only input, write-only output and a bit-budgeted memory"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--n", o.n, "Element count (bounds: grid such as 2,4,2^31,1..8)");
    sub->add_option("--d", o.d, "Bits per element");
    sub->add_option("--t", o.t, "Working memory budget in bits");
    sub->add_option("--max-steps", o.max_steps, "Step cap (default 8n+8)");
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  };

  auto* run = app.add_subcommand("run", "Execute one algorithm on one input and print its trace");
  add_common(run);
  run->add_option("--alg", o.alg, "standard | optimized | first-pass-minimal | cheat:k");
  run->add_option("--input", o.input, "Comma-separated input words");
  run->add_option("--seed", o.seed, "Seed for a random input of length --n");

  auto* bounds = app.add_subcommand("bounds", "Tabulate the lower bounds and gaps over parameter grids");
  add_common(bounds);
  bounds->add_flag("--auto-t", o.auto_t, "Add rows with t = d + ceil(log2 n)");

  auto* falsify = app.add_subcommand("falsify", "Search for a first-pass perturbation counterexample");
  add_common(falsify);
  falsify->add_option("--alg", o.alg, "Algorithm name");
  falsify->add_option("--input", o.input, "Single base input (default: all inputs)");

  auto* audit = app.add_subcommand("audit", "Check injectivity of (boundary state, transcript) over all inputs");
  add_common(audit);
  audit->add_option("--alg", o.alg, "Algorithm name");
  audit->add_flag("--dump-pairs", o.dump_pairs, "Include every (state, transcript) pair as hex");

  auto* search_cmd = app.add_subcommand("search", "Exhaustive minimum reads over all t-bit protocols");
  add_common(search_cmd);
  search_cmd->add_option("--max-protocols", o.max_protocols, "Enumeration guard");

  auto* reconstruct = app.add_subcommand("reconstruct", "Recover an input from a sum-exclude-self output");
  add_common(reconstruct);
  reconstruct->add_option("--input", o.input, "Comma-separated output vector");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*run) return cmd_run(o);
    if (*bounds) {
      if (bounds->count("--format") == 0) o.format = "csv";
      return cmd_bounds(o);
    }
    if (*falsify) return cmd_falsify(o);
    if (*audit) return cmd_audit(o);
    if (*search_cmd) return cmd_search(o);
    if (*reconstruct) return cmd_reconstruct(o);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const EnumerationTooLarge& e) {
    std::cerr << "guard: " << e.what() << "\n";
    return kGuard;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const ModelError& e) {
    std::cerr << "execution error: " << e.what() << "\n";
    return kViolation;
  }
  return kUsage;
}
