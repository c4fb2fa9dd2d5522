#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "stlaws/stlaws.hpp"

namespace {

using namespace stlaws;

std::pair<double, double> parse_pair(const std::string& text, const char* what) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw ArgumentError(std::string(what) + " must be 'lo,hi'");
  try {
    const double lo = std::stod(text.substr(0, comma));
    const double hi = std::stod(text.substr(comma + 1));
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw ArgumentError(std::string(what) + " must be 'lo,hi', got '" + text + "'");
  }
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw ArgumentError("cannot open " + path + " for writing");
  return file;
}

void emit_report(CensusReport report, const std::map<std::string, std::string>& flags, const std::string& out_dir) {
  report.flags = flags;
  const auto files = write_report_files(report, out_dir);
  std::cout << "case: " << report.case_id << " (" << law_name(report.law) << ")\n"
            << "n_good: " << report.n_good << "\n"
            << "discrepancy: " << report.discrepancy << "\n"
            << "envelope_ratio: " << report.envelope_ratio << "\n";
  for (const auto& a : report.atoms_observed) {
    std::cout << "atom " << a.location << ": empirical " << a.empirical_mass << ", expected " << a.expected_mass
              << "\n";
  }
  if (report.anomalies > 0) std::cout << "anomalies: " << report.anomalies << "\n";
  for (const auto& f : files) std::cout << "wrote " << f.string() << "\n";
}

int cmd_trace(const std::string& spec, std::uint64_t pmax, const std::string& cache_path, unsigned workers) {
  const auto curve = WeierstrassCurve::parse(spec);
  if (pmax < 2 || pmax > kMaxSweepBound) throw ArgumentError("--pmax must lie in [2, 2^31]");
  TraceSweep sweep;
  bool wrote = false;
  if (!cache_path.empty() && std::filesystem::exists(cache_path)) {
    auto cache = read_trace_cache(cache_path);
    if (cache.fingerprint != curve.fingerprint()) {
      throw ArgumentError("cache " + cache_path + " belongs to a different curve");
    }
    if (cache.sweep.X >= pmax) {
      sweep = truncate_sweep(cache.sweep, pmax);
      std::cout << "cache up to date (X = " << cache.sweep.X << ")\n";
    } else {
      sweep = extend_sweep(curve, std::move(cache.sweep), pmax, workers);
      write_trace_cache(cache_path, curve, sweep);
      wrote = true;
    }
  } else {
    sweep = trace_sweep(curve, pmax, workers);
    if (!cache_path.empty()) {
      write_trace_cache(cache_path, curve, sweep);
      wrote = true;
    }
  }
  double worst = 0.0;
  std::size_t zeros = 0;
  for (const auto& r : sweep.records) {
    if (!r.good) continue;
    worst = std::max(worst, std::abs(static_cast<double>(r.a_p)) / (2.0 * std::sqrt(static_cast<double>(r.p))));
    zeros += (r.a_p == 0);
  }
  const auto good = sweep.good_count();
  std::cout << "curve: " << curve.canonical() << "\n"
            << "X: " << sweep.X << "\n"
            << "records: " << sweep.records.size() << "\n"
            << "n_good: " << good << "\n"
            << "max |a_p|/2sqrt(p): " << worst << "\n"
            << "zero_trace_fraction: " << (good == 0 ? 0.0 : static_cast<double>(zeros) / good) << "\n";
  if (wrote) std::cout << "wrote " << cache_path << "\n";
  return 0;
}

int verify_k3(const Rational& lambda, const TraceSweep& sweep) {
  int checked = 0;
  for (const auto& r : sweep.records) {
    if (r.p < 5 || r.p > 199) continue;
    const auto t = k3_trace(lambda, r.p, r);
    if (!t) continue;
    const double oracle = k3_trace_oracle(lambda, r.p);
    if (std::abs(*t - oracle) > 1e-6 * static_cast<double>(r.p)) {
      std::ostringstream msg;
      msg << "verification failed at p = " << r.p << ": trace " << *t << ", character sum " << oracle;
      throw NumericError(msg.str());
    }
    ++checked;
  }
  std::cout << "verified " << checked << " primes against the character-sum oracle\n";
  return checked;
}

int run(int argc, char** argv) {
  CLI::App app{"Frobenius-trace censuses against Sato-Tate type laws"};
  app.require_subcommand(1);
  unsigned threads = default_workers();
  app.add_option("--threads", threads, "worker threads (wall time only)")->check(CLI::Range(1u, 1024u));

  std::string curve_spec, cache_path;
  std::uint64_t trace_pmax = 0;
  auto* trace = app.add_subcommand("trace", "sweep a_p for one curve, optionally through a cache");
  trace->add_option("curve", curve_spec, "'A,B' for y^2 = x^3 + Ax + B, 'clausen:lambda' or 'k3clausen:lambda'")->required();
  trace->add_option("--pmax", trace_pmax, "sweep bound")->required();
  trace->add_option("--cache", cache_path, "trace cache file to create or extend");

  std::string lambda_text, out_dir = ".";
  std::uint64_t k3_pmax = 100000;
  bool verify = false;
  auto* k3 = app.add_subcommand("k3", "census of K3 traces of X_lambda");
  k3->add_option("--lambda", lambda_text, "rational parameter")->required();
  k3->add_option("--pmax", k3_pmax, "sweep bound")->capture_default_str();
  k3->add_flag("--verify", verify, "cross-check traces with the character-sum oracle for p <= 199");
  k3->add_option("--out", out_dir, "output directory")->capture_default_str();

  std::string curve1, curve2;
  std::uint64_t dq_pmax = 100000;
  auto* dq = app.add_subcommand("dq", "census of double quadric traces a*_E a*_E'");
  dq->add_option("--curve1", curve1, "first curve")->required();
  dq->add_option("--curve2", curve2, "second curve")->required();
  dq->add_option("--pmax", dq_pmax, "sweep bound")->capture_default_str();
  dq->add_option("--out", out_dir, "output directory")->capture_default_str();

  std::string ap_curve, ap_interval = "0,1.5707963267948966";
  std::uint64_t ap_pmax = 100000, ap_q = 1, ap_a = 0;
  auto* ap = app.add_subcommand("ap", "angle census restricted to an arithmetic progression");
  ap->add_option("--curve", ap_curve, "curve")->required();
  ap->add_option("--pmax", ap_pmax, "sweep bound")->capture_default_str();
  ap->add_option("--q", ap_q, "modulus")->required();
  ap->add_option("--a", ap_a, "residue")->required();
  ap->add_option("--interval", ap_interval, "angle interval 'lo,hi' in [0,pi]")->capture_default_str();
  ap->add_option("--out", out_dir, "output directory")->capture_default_str();

  std::string law_text, density_out;
  int grid = 1001;
  auto* density_cmd = app.add_subcommand("density", "dump a law's density on a uniform grid as CSV");
  density_cmd->alias("density-dump");
  density_cmd->add_option("--law", law_text, "law name")->required();
  density_cmd->add_option("--grid", grid, "number of grid points")->capture_default_str()->check(CLI::Range(2, 10000000));
  density_cmd->add_option("--out", density_out, "output file (default stdout)");

  std::string interval_text, side_text = "major", selberg_out;
  int M = 10;
  auto* selberg = app.add_subcommand("selberg", "dump Selberg polynomial cosine coefficients as CSV");
  selberg->alias("selberg-dump");
  selberg->add_option("--interval", interval_text, "angle interval 'lo,hi' in [0,pi]")->required();
  selberg->add_option("--M", M, "degree")->capture_default_str()->check(CLI::Range(1, 100000));
  selberg->add_option("--side", side_text, "major or minor")->capture_default_str();
  selberg->add_option("--out", selberg_out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (*trace) return cmd_trace(curve_spec, trace_pmax, cache_path, threads);

  if (*k3) {
    const auto lambda = Rational::parse(lambda_text);
    require_k3_parameter(lambda);
    if (k3_pmax < 100 || k3_pmax > kMaxSweepBound) throw ArgumentError("--pmax must lie in [100, 2^31]");
    const auto sweep = trace_sweep(k3_clausen_curve(lambda), k3_pmax, threads);
    if (verify) verify_k3(lambda, sweep);
    emit_report(k3_census(lambda, sweep),
                {{"command", "k3"},
                 {"lambda", lambda.to_string()},
                 {"pmax", std::to_string(k3_pmax)},
                 {"verify", verify ? "true" : "false"}},
                out_dir);
    return 0;
  }

  if (*dq) {
    const auto e = WeierstrassCurve::parse(curve1);
    const auto e_prime = WeierstrassCurve::parse(curve2);
    if (dq_pmax < 100 || dq_pmax > kMaxSweepBound) throw ArgumentError("--pmax must lie in [100, 2^31]");
    emit_report(dq_census(e, e_prime, dq_pmax, threads),
                {{"command", "dq"},
                 {"curve1", e.canonical()},
                 {"curve2", e_prime.canonical()},
                 {"pmax", std::to_string(dq_pmax)}},
                out_dir);
    return 0;
  }

  if (*ap) {
    const auto curve = WeierstrassCurve::parse(ap_curve);
    const auto [lo, hi] = parse_pair(ap_interval, "--interval");
    if (ap_pmax < 100 || ap_pmax > kMaxSweepBound) throw ArgumentError("--pmax must lie in [100, 2^31]");
    emit_report(ap_census(curve, ap_pmax, ap_q, ap_a, Interval(lo, hi), threads),
                {{"command", "ap"},
                 {"curve", curve.canonical()},
                 {"pmax", std::to_string(ap_pmax)},
                 {"q", std::to_string(ap_q)},
                 {"a", std::to_string(ap_a)},
                 {"interval", ap_interval}},
                out_dir);
    return 0;
  }

  if (*density_cmd) {
    const auto law = make_law(parse_law(law_text));
    std::ofstream file;
    auto& out = open_output(density_out, file);
    out.precision(17);
    out << "t,density\n";
    const double lo = law.support.lo();
    const double hi = law.support.hi();
    for (int i = 0; i < grid; ++i) {
      const double t = lo + (hi - lo) * i / (grid - 1);
      const double d = density(law, t);
      if (!std::isfinite(d)) continue;
      out << t << ',' << d << '\n';
    }
    out << "\natom_location,mass\n";
    for (const auto& a : law.atoms) out << a.location << ',' << a.mass.to_string() << '\n';
    return 0;
  }

  if (*selberg) {
    const auto [lo, hi] = parse_pair(interval_text, "--interval");
    const auto poly = selberg_polynomial(lo, hi, M, parse_side(side_text));
    std::ofstream file;
    auto& out = open_output(selberg_out, file);
    out.precision(17);
    out << "m,coefficient\n";
    for (int m = 0; m <= M; ++m) out << m << ',' << poly.coeffs[m] << '\n';
    return 0;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
