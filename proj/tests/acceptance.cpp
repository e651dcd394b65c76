// One PASS/FAIL line per acceptance criterion. Exits nonzero if any fails.
#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "chokepoint/chokepoint.hpp"

using namespace chokepoint;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && failures_++ < 5) notes_ << (notes_.tellp() > 0 ? "; " : "") << what;
  }
  Outcome done(const std::string& summary) const {
    return {failures_ == 0, failures_ == 0 ? summary : notes_.str() + " (" + std::to_string(failures_) + " failures)"};
  }

 private:
  std::uint64_t failures_ = 0;
  std::ostringstream notes_;
};

std::vector<AlgorithmSpec> correct_algorithms() {
  return {algorithms::two_pass_standard(), algorithms::two_pass_optimized(), algorithms::first_pass_minimal()};
}

std::string shape(std::size_t n, unsigned d) { return "n=" + std::to_string(n) + " d=" + std::to_string(d); }

Outcome exhaustive_correctness() {
  Check c;
  std::uint64_t runs = 0;
  for (const auto& alg : {algorithms::two_pass_standard(), algorithms::two_pass_optimized()}) {
    for (std::size_t n = 1; n <= 5; ++n) {
      for (unsigned d = 1; d <= 2; ++d) {
        for_each_input(n, d, [&](const InputInstance& in) {
          ++runs;
          c.expect(execute(alg, in, 64).final_output == formulas::forward_map(in), alg->name() + " " + shape(n, d));
        });
      }
    }
  }
  return c.done(std::to_string(runs) + " runs exact");
}

Outcome read_counts() {
  Check c;
  std::uint64_t inputs = 0;
  for (std::size_t n = 1; n <= 5; ++n) {
    for (unsigned d = 1; d <= 2; ++d) {
      for_each_input(n, d, [&](const InputInstance& in) {
        ++inputs;
        const auto s = execute(algorithms::two_pass_standard(), in, 64).read_count();
        const auto o = execute(algorithms::two_pass_optimized(), in, 64).read_count();
        c.expect(s == static_cast<std::uint64_t>(formulas::standard_reads(n)), "standard reads at " + shape(n, d));
        c.expect(o == static_cast<std::uint64_t>(formulas::optimized_reads(n)), "optimized reads at " + shape(n, d));
        const auto m = split_passes(execute(algorithms::first_pass_minimal(), in, 64)).first_pass_reads;
        c.expect(m == n - 1, "first-pass-minimal first pass at " + shape(n, d));
      });
    }
  }
  return c.done(std::to_string(inputs) + " inputs; 2n, 2n-1 and n-1 everywhere (n=1 needs no reads)");
}

Outcome first_pass_lemma() {
  Check c;
  for (const auto& alg : correct_algorithms()) {
    for (std::size_t n = 2; n <= 4; ++n) {
      for (unsigned d = 1; d <= 2; ++d) {
        const auto r = adversary::verify_first_pass_bound(alg, n, d, 64);
        c.expect(r.holds && r.min_first_pass_distinct_reads >= n - 1, alg->name() + " " + shape(n, d));
      }
    }
  }
  std::uint64_t witnesses = 0;
  for (std::size_t n = 2; n <= 6; ++n) {
    for (unsigned d = 1; d <= 2; ++d) {
      for (std::size_t k = 0; k + 2 <= n; ++k) {
        const auto alg = algorithms::greedy_cheat(k);
        const auto cex = adversary::falsify(alg, n, d, 64);
        const bool ok = cex && adversary::replay(alg, *cex, 64);
        witnesses += ok;
        c.expect(ok, "no replayable witness for cheat:" + std::to_string(k) + " at " + shape(n, d));
      }
    }
  }
  return c.done("bound holds for 3 algorithms; " + std::to_string(witnesses) + " cheat witnesses replayed");
}

Outcome reconstruction() {
  Check c;
  std::uint64_t count = 0;
  auto check = [&](const InputInstance& in) {
    ++count;
    const auto out = formulas::forward_map(in);
    c.expect(formulas::reconstruct_instance(out, in.d()) == in, "round trip at " + shape(in.n(), in.d()));
    c.expect(formulas::output_sum_identity(in).holds, "output sum at " + shape(in.n(), in.d()));
  };
  for (std::size_t n = 2; n <= 4; ++n) {
    for (unsigned d = 1; d <= 2; ++d) for_each_input(n, d, check);
  }
  std::mt19937_64 rng(20261019);
  for (int k = 0; k < 10000; ++k) {
    const std::size_t n = 2 + rng() % 999;
    const unsigned d = 1 + static_cast<unsigned>(rng() % 64);
    std::vector<std::uint64_t> v(n);
    for (auto& x : v) x = d == 64 ? rng() : rng() & ((std::uint64_t{1} << d) - 1);
    check(InputInstance(d, v));
  }
  return c.done(std::to_string(count) + " instances round-trip; output sum identity on all");
}

Outcome choke_point_audit() {
  Check c;
  const std::pair<std::size_t, unsigned> points[] = {{2, 1}, {3, 1}, {2, 2}, {3, 2}, {4, 1}};
  for (const auto& alg : {algorithms::two_pass_standard(), algorithms::two_pass_optimized()}) {
    for (const auto& [n, d] : points) {
      const auto r = audit::chokepoint_audit(alg, n, d, 64);
      c.expect(r.injective && r.distinct_pairs == (std::uint64_t{1} << (n * d)) &&
                   r.t_state_bits + r.u_max >= n * d,
               alg->name() + " " + shape(n, d));
    }
  }
  return c.done("injective with t+u >= nd at all 10 points");
}

Outcome memory_sizing() {
  Check c;
  std::uint64_t worst_slack = ~std::uint64_t{0};
  for (const auto& alg : {algorithms::two_pass_standard(), algorithms::two_pass_optimized()}) {
    for (std::size_t n = 1; n <= 5; ++n) {
      for (unsigned d = 1; d <= 3; ++d) {
        const std::uint64_t limit = d + ceil_log2(n);
        for_each_input(n, d, [&](const InputInstance& in) {
          const auto trace = execute(alg, in, 64);
          bool seen = false;
          for (std::size_t k = 0; k < trace.events.size(); ++k) {
            if (trace.events[k].kind != EventKind::kPhaseMark) continue;
            seen = true;
            // The StateSize event right after the mark.
            const auto bits = static_cast<std::uint64_t>(trace.events[k + 1].value);
            c.expect(bits <= limit, alg->name() + " " + shape(n, d) + " holds " + std::to_string(bits) + " bits");
            worst_slack = std::min(worst_slack, limit - std::min(limit, bits));
          }
          c.expect(seen || n == 1, alg->name() + " " + shape(n, d) + " has no phase mark");
        });
      }
    }
  }
  return c.done("state at the phase mark within d + ceil(log2 n); min slack " + std::to_string(worst_slack));
}

std::string run_cli(const std::string& args, int& code) {
  FILE* p = popen((std::string(CHOKEPOINT_CLI) + " " + args).c_str(), "r");
  std::string out;
  if (!p) {
    code = -1;
    return out;
  }
  char buf[4096];
  std::size_t got = 0;
  while ((got = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, got);
  const int status = pclose(p);
  code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return out;
}

Outcome gaps() {
  Check c;
  int code = 0;
  const auto a = json::parse(run_cli("bounds --n 2^31 --d 32 --auto-t --format json", code));
  c.expect(code == 0 && a.size() == 1, "bounds at n=2^31 failed");
  const auto& r = a.at(0);
  c.expect(r["t"] == 63, "auto t at n=2^31 is " + r["t"].dump());
  c.expect(r["read_gap"] == 0, "read_gap at n=2^31 is " + r["read_gap"].dump());
  c.expect(r["standard_gap"] == 2, "standard gap is " + r["standard_gap"].dump());
  c.expect(r["optimized_gap"] == 0, "optimized gap is " + r["optimized_gap"].dump());
  const auto b = json::parse(run_cli("bounds --n 2^40 --d 32 --auto-t --format json", code));
  c.expect(code == 0 && b.at(0)["read_gap"] == 1, "read_gap at n=2^40 is " + b.at(0)["read_gap"].dump());
  return c.done("n=2^31: read_gap=0 standard_gap=2 optimized_gap=0; n=2^40: read_gap=1");
}

Outcome protocol_search() {
  Check c;
  std::ostringstream summary;
  const std::pair<unsigned, std::int64_t> targets[] = {{1, 2}, {2, 2}};
  for (const auto& [t, expected] : targets) {
    const auto r = search::min_reads(2, 1, t);
    const std::string got = r.min_total_reads ? std::to_string(*r.min_total_reads) : "none";
    summary << (summary.tellp() > 0 ? "; " : "") << "t=" << t << ": " << r.protocols_enumerated << " tables, "
            << r.correct_protocols << " correct, min_reads=" << got << ", total_bound=" << r.bound_total;
    c.expect(r.bound_respected && r.first_pass_bound_respected, "a protocol beats a bound at t=" + std::to_string(t));
    c.expect(r.min_total_reads && static_cast<std::int64_t>(*r.min_total_reads) == expected,
             "min_reads(2,1," + std::to_string(t) + ") = " + got + ", expected " + std::to_string(expected));
  }
  auto o = c.done(summary.str());
  if (!o.pass) {
    o.detail += ". " + summary.str() +
                ". A t-bit state table never revisits a state on a halting run, so it performs at most 2^t - 1 "
                "actions; two reads and two writes need t >= 3";
  }
  return o;
}

Outcome floor_ceiling() {
  Check c;
  std::uint64_t cases = 0;
  for (std::int64_t n = 0; n <= 64; ++n) {
    for (std::int64_t t = 0; t <= 64; ++t) {
      for (std::int64_t d = 1; d <= 8; ++d) {
        ++cases;
        c.expect(formulas::floor_ceiling_identity(n, t, d), "n=" + std::to_string(n) + " t=" + std::to_string(t) +
                                                                " d=" + std::to_string(d));
      }
    }
  }
  return c.done(std::to_string(cases) + " cases");
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"1 exhaustive correctness", exhaustive_correctness},
      {"2 read counts", read_counts},
      {"3 first-pass lower bound and adversary", first_pass_lemma},
      {"4 reconstruction round trip", reconstruction},
      {"5 choke-point audit", choke_point_audit},
      {"6 summary memory sizing", memory_sizing},
      {"7 gap reproduction", gaps},
      {"8 exhaustive protocol search", protocol_search},
      {"9 floor/ceiling identity", floor_ceiling},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !o.pass;
    std::printf("%s criterion %s [%.2fs]: %s\n", o.pass ? "PASS" : "FAIL", name, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of 9 criteria passed\n", 9 - failed);
  return failed == 0 ? 0 : 1;
}
