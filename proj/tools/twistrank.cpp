// twistrank: command-line front end.
//
//   rank     --c c1,c2,c3 --b B [--oracle] [--formal-check]
//   sweep    --c c1,c2,c3 --N INT [--window] [--workers K] [--out PATH] [--resume]
//   simulate --c c1,c2,c3 --n INT --samples INT --seed INT
//   alpha    --dmax INT
//   charsum  --spec PATH
//   report   --in PATH --format text|csv|plotdata
//
// Exit codes: 0 ok, 1 internal disagreement, 2 invalid input,
// 3 precision exhausted, 4 I/O.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "twistrank/charlab.hpp"
#include "twistrank/density.hpp"
#include "twistrank/errors.hpp"
#include "twistrank/harness.hpp"
#include "twistrank/selmer.hpp"

using namespace twistrank;

namespace {

struct FamilyArgs {
  std::string c;
  std::vector<std::uint64_t> extra;
  std::uint64_t D = 0;

  void attach(CLI::App* app) {
    app->add_option("--c", c, "Roots c1,c2,c3 (integers or a/b)")->required();
    app->add_option("--extra-primes", extra, "Additional primes to put in S");
    app->add_option("--D", D, "Modulus D (default 8 * odd primes of S)");
  }

  TwistFamily make() const {
    std::vector<std::string> parts;
    std::stringstream ss(c);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(item);
    if (parts.size() != 3) throw InvalidArgument("--c needs exactly three comma-separated values");
    std::array<Rational, 3> r{parse_rational(parts[0]), parse_rational(parts[1]), parse_rational(parts[2])};
    return TwistFamily::make(r, extra, D);
  }
};

std::string join(const std::vector<std::uint64_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "*" : "") + std::to_string(v[i]);
  return s.empty() ? "1" : s;
}

int run_rank(const FamilyArgs& fa, std::int64_t b, bool oracle, bool formal_check) {
  const auto family = fa.make();
  const auto a = analyze_twist(family, b);
  const auto rec = selmer_rank(family, b);
  const auto pp = parity_predict(family, b);
  std::printf("family       %s\n", family.key().c_str());
  std::printf("b            %lld = %s%s\n", static_cast<long long>(b), b < 0 ? "-" : "", join(rec.factors).c_str());
  std::printf("omega        %d\n", rec.omega);
  std::printf("M            %zu\n", a.space.M());
  std::printf("dim S2(E_b)  %d\n", rec.selmer_dim);
  std::printf("parity       %d (predicted %d, d = %lld)\n", rec.parity, pp.parity, static_cast<long long>(pp.d));
  if (rec.class_mod_D) std::printf("class mod D  %llu\n", static_cast<unsigned long long>(rec.class_mod_D));
  int status = pp.parity == rec.parity ? 0 : 1;
  if (oracle) {
    const int cs = selmer_rank_charsum(family, b);
    std::printf("charsum      %d %s\n", cs, cs == rec.selmer_dim ? "(agrees)" : "(DISAGREES)");
    if (cs != rec.selmer_dim) status = 1;
  }
  if (formal_check) {
    const int fr = selmer_rank_formal(family, FormalTwistModel::extract(family, b));
    std::printf("formal       %d %s\n", fr, fr == rec.selmer_dim ? "(agrees)" : "(DISAGREES)");
    if (fr != rec.selmer_dim) status = 1;
  }
  return status;
}

int run_simulate(const FamilyArgs& fa, int n, std::uint64_t samples, std::uint64_t seed, unsigned workers,
                 bool exhaustive) {
  const auto family = fa.make();
  const auto est = exhaustive ? pi_exhaustive(family, n, workers) : pi_estimate(family, n, samples, seed, workers);
  std::printf("# n = %d, %s = %llu, seed = %llu\n", n, exhaustive ? "configurations" : "samples",
              static_cast<unsigned long long>(est.samples), static_cast<unsigned long long>(seed));
  std::printf("%4s %10s %10s %10s %10s\n", "d", "count", "pi_d", "stderr", "alpha_d");
  int top = 8;
  if (!est.histogram.empty()) top = std::max(top, est.histogram.rbegin()->first);
  for (int d = 2; d <= top; ++d) {
    const auto it = est.histogram.find(d);
    std::printf("%4d %10llu %10.6f %10.6f %10.6f\n", d,
                static_cast<unsigned long long>(it == est.histogram.end() ? 0 : it->second), est.fraction(d),
                est.standard_error(d), static_cast<double>(alpha(d)));
  }
  std::printf("# total variation to alpha: %.6f\n", est.tv_distance_to_alpha());
  return 0;
}

int run_alpha(int dmax) {
  const auto t = AlphaTable::make(dmax);
  std::printf("%4s %22s %22s\n", "d", "alpha_d", "by partitions");
  for (int d = 0; d <= dmax; ++d) {
    std::printf("%4d %22.15Le %22.15Le\n", d, t.values[static_cast<std::size_t>(d)], alpha_by_partitions(d));
  }
  std::printf("# partial sum %.18Lf, tail bound %.3Le\n", t.partial_sum(), t.tail_bound);
  for (int k = 1; k <= 3; ++k) std::printf("# F(2^%d) = %.6Lf\n", k, F_pow2(k));
  return 0;
}

int run_charsum(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("spec file: ") + e.what());
  }
  const auto spec = CharSumSpec::from_json(j);
  const auto res = char_sum(spec);
  nlohmann::ordered_json out;
  out["n"] = spec.n;
  out["N"] = spec.N;
  out["D"] = spec.D;
  out["m"] = res.m;
  out["tuples"] = res.tuples;
  out["numerator"] = res.numerator;
  out["n_factorial"] = res.n_factorial;
  out["value"] = res.value();
  out["value_over_N"] = res.value() / static_cast<double>(spec.N);
  std::cout << out.dump(2) << "\n";
  return 0;
}

int run_report(const std::string& path, const std::string& format) {
  const auto fmt = parse_report_format(format);
  const auto rf = read_record_file(path);
  if (rf.truncated_tail) std::cerr << "warning: ignoring incomplete trailing record\n";
  const auto table = table_from_records(rf.header.N, rf.records);
  int top = 20;
  if (!table.counts.empty()) top = std::max(top, table.counts.rbegin()->first);
  std::cout << report(table, AlphaTable::make(top), fmt);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact 2-Selmer ranks of quadratic twists and their statistics"};
  app.require_subcommand(1);

  FamilyArgs rank_fam, sweep_fam, sim_fam;
  std::int64_t b = 1;
  bool oracle = false, formal_check = false;
  auto* rank = app.add_subcommand("rank", "dim S2(E_b) for one twist");
  rank_fam.attach(rank);
  rank->add_option("--b", b, "Squarefree twist parameter")->required()->allow_extra_args(false);
  rank->add_flag("--oracle", oracle, "Cross-check with the character-sum oracle");
  rank->add_flag("--formal-check", formal_check, "Cross-check with formal-symbol mode");

  std::uint64_t N = 0;
  bool window = false, resume = false, negatives = false;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::string out_path, sweep_format = "text";
  auto* sweep_cmd = app.add_subcommand("sweep", "Selmer ranks of all eligible b <= N");
  sweep_fam.attach(sweep_cmd);
  sweep_cmd->add_option("--N", N, "Upper bound for b")->required();
  sweep_cmd->add_flag("--window", window, "Restrict omega(b) to the loglog window");
  sweep_cmd->add_option("--workers", workers, "Worker threads");
  sweep_cmd->add_option("--out", out_path, "Record file (one JSON object per line)");
  sweep_cmd->add_flag("--resume", resume, "Continue an interrupted record file");
  sweep_cmd->add_flag("--include-negative", negatives, "Also sweep -b");
  sweep_cmd->add_option("--format", sweep_format, "Report format: text, csv or plotdata");

  int n = 0;
  std::uint64_t samples = 10000, seed = 1;
  bool exhaustive = false;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo estimate of pi_d(n)");
  sim_fam.attach(sim);
  sim->add_option("--n", n, "Number of twist primes")->required();
  sim->add_option("--samples", samples, "Sample count");
  sim->add_option("--seed", seed, "Seed");
  sim->add_option("--workers", workers, "Worker threads");
  sim->add_flag("--exhaustive", exhaustive, "Enumerate every configuration instead of sampling");

  int dmax = 10;
  auto* alpha_cmd = app.add_subcommand("alpha", "Table of alpha_d");
  alpha_cmd->add_option("--dmax", dmax, "Largest d")->required();

  std::string spec_path;
  auto* cs = app.add_subcommand("charsum", "Evaluate a character sum from a JSON spec");
  cs->add_option("--spec", spec_path, "Spec file")->required();

  std::string in_path, format = "text";
  auto* rep = app.add_subcommand("report", "Summarise a sweep record file");
  rep->add_option("--in", in_path, "Record file")->required();
  rep->add_option("--format", format, "text, csv or plotdata");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*rank) return run_rank(rank_fam, b, oracle, formal_check);
    if (*sweep_cmd) {
      SweepConfig cfg;
      cfg.family = sweep_fam.make();
      cfg.N = N;
      cfg.window_filter = window;
      cfg.positive_only = !negatives;
      cfg.workers = workers;
      if (!out_path.empty()) cfg.output = out_path;
      cfg.resume = resume;
      const auto fmt = parse_report_format(sweep_format);
      const auto table = sweep(cfg);
      if (table.total == 0) {
        std::cout << "no eligible twists\n";
        return 0;
      }
      int top = 20;
      if (!table.counts.empty()) top = std::max(top, table.counts.rbegin()->first);
      std::cout << report(table, AlphaTable::make(top), fmt);
      return 0;
    }
    if (*sim) return run_simulate(sim_fam, n, samples, seed, workers, exhaustive);
    if (*alpha_cmd) return run_alpha(dmax);
    if (*cs) return run_charsum(spec_path);
    if (*rep) return run_report(in_path, format);
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const ConfigMismatch& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const BudgetExceeded& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const UnsupportedFamily& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const PrecisionExhausted& e) {
    std::cerr << "precision exhausted: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
