#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "rpz/bases.hpp"
#include "rpz/bounds.hpp"
#include "rpz/ensembles.hpp"
#include "rpz/experiment.hpp"
#include "rpz/polycore.hpp"
#include "rpz/zerostats.hpp"

namespace {

using namespace rpz;

bool use_color() {
  return isatty(fileno(stdout)) && std::getenv("NO_COLOR") == nullptr;
}

std::string paint(const std::string& s, const char* code) {
  if (!use_color()) return s;
  return std::string("\033[") + code + "m" + s + "\033[0m";
}

struct EnsembleFlags {
  std::string family = "complex-gaussian";
  double scale = 1.0;
  double p = 0.5;
  double alpha = 3.0;
  std::vector<double> weights;
  std::string base = "rademacher";

  void attach(CLI::App* cmd) {
    cmd->add_option("--ensemble", family,
                    "coefficient family: complex-gaussian, real-gaussian, "
                    "uniform-disk, rademacher, bernoulli, pareto, "
                    "moving-average");
    cmd->add_option("--scale", scale, "coefficient scale multiplier");
    cmd->add_option("--p", p, "bernoulli success probability");
    cmd->add_option("--alpha", alpha, "pareto tail exponent");
    cmd->add_option("--weights", weights,
                    "moving-average weights (defines the window)");
    cmd->add_option("--base", base, "moving-average base family");
  }

  EnsembleSpec build() const {
    EnsembleSpec spec;
    spec.family = family_from_name(family);
    spec.scale = scale;
    spec.p = p;
    spec.alpha = alpha;
    if (spec.family == Family::moving_average) {
      EnsembleSpec b;
      b.family = family_from_name(base);
      b.p = p;
      b.alpha = alpha;
      spec.base = std::make_shared<EnsembleSpec>(std::move(b));
      spec.weights = weights;
    }
    validate(spec);
    return spec;
  }
};

Polynomial poly_from_input(const std::string& coeffs,
                           const std::string& infile) {
  if (!coeffs.empty()) return polynomial_from_csv_row(coeffs);
  if (infile.empty()) {
    throw config_error("give a polynomial with --coeffs or --in");
  }
  std::ifstream in(infile);
  if (!in) throw io_error("cannot open '" + infile + "'");
  std::string line;
  if (!std::getline(in, line)) throw io_error("'" + infile + "' is empty");
  return polynomial_from_csv_row(line);
}

BoundReport wrap_scalar(const std::string& name, double value,
                        std::vector<std::pair<std::string, double>> inputs) {
  BoundReport rep;
  rep.name = name;
  rep.value = value;
  rep.inputs = std::move(inputs);
  return rep;
}

int run_sample(const EnsembleFlags& ef, const std::string& config_path, int n,
               std::uint64_t seed, int trial, const std::string& out_path) {
  EnsembleSpec spec = config_path.empty()
                          ? ef.build()
                          : parse_config_file(config_path).ensemble;
  const CoefficientDraw draw = sample_coefficients(spec, n, {seed, n, trial, 0});
  std::string row;
  char buf[64];
  for (const cplx& v : draw.values) {
    if (!row.empty()) row.push_back(',');
    std::snprintf(buf, sizeof buf, "%.17g", v.real());
    row += buf;
    row.push_back(',');
    std::snprintf(buf, sizeof buf, "%.17g", v.imag());
    row += buf;
  }
  row.push_back('\n');
  if (out_path.empty()) {
    std::cout << row;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw io_error("cannot write '" + out_path + "'");
    out << row;
  }
  return 0;
}

int run_roots(const std::string& coeffs, const std::string& infile, double tol,
              int max_iter) {
  const Polynomial p = poly_from_input(coeffs, infile);
  const RootSet rs = find_roots(p, tol, max_iter);
  char buf[160];
  std::cout << "root,re,im,residual\n";
  for (std::size_t i = 0; i < rs.roots.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.3g\n", i,
                  rs.roots[i].real(), rs.roots[i].imag(), rs.residuals[i]);
    std::cout << buf;
  }
  std::snprintf(buf, sizeof buf, "reconstruction_error,%.3g\n",
                rs.reconstruction_error);
  std::cout << buf;
  return 0;
}

int run_discrepancy(const std::string& coeffs, const std::string& infile,
                    double r, double alpha, double beta) {
  const Polynomial p = poly_from_input(coeffs, infile);
  const RootSet rs = find_roots(p);
  AnnularSector s{r, alpha, beta};
  validate(s);
  char buf[96];
  std::snprintf(buf, sizeof buf, "sector_measure,%.17g\n",
                sector_measure(rs, s));
  std::cout << buf;
  std::snprintf(buf, sizeof buf, "uniform_measure,%.17g\n",
                (s.beta - s.alpha) / kTwoPi);
  std::cout << buf;
  std::snprintf(buf, sizeof buf, "discrepancy,%.17g\n",
                sector_discrepancy(rs, s));
  std::cout << buf;
  std::snprintf(buf, sizeof buf, "et_rhs,%.17g\n", erdos_turan_rhs(p, rs, s));
  std::cout << buf;
  return 0;
}

int run_bounds(const EnsembleFlags& ef, int n, double t, double r) {
  const EnsembleSpec spec = ef.build();
  double moment_t;
  try {
    moment_t = abs_moment(spec, t).value;
  } catch (const hypothesis_error&) {
    moment_t = std::numeric_limits<double>::infinity();
  }
  const LogMomentEstimate le = log_abs_moment(spec);
  const double elog =
      le.finite ? le.value : -std::numeric_limits<double>::infinity();
  const double sum_moments = (n + 1.0) * moment_t;

  std::vector<BoundReport> reports;
  reports.push_back(thm21_bound(n, t, sum_moments, elog, elog, r));
  reports.push_back(cor22_bound(n, t, moment_t, elog, r));
  if (std::isfinite(moment_t)) {
    reports.push_back(wrap_scalar("prop41", prop41_bound(n, t, moment_t),
                                  {{"n", static_cast<double>(n)},
                                   {"t", t},
                                   {"mu", moment_t}}));
  } else {
    BoundReport rep;
    rep.name = "prop41";
    rep.value = std::numeric_limits<double>::quiet_NaN();
    rep.flags.push_back("hypothesis violated: E|A_0|^t is infinite");
    reports.push_back(std::move(rep));
  }
  try {
    const AbsMomentBounds ab = sup_abs_moments(spec);
    const double s = std::sqrt(std::max(0.0, ab.variance_bound));
    reports.push_back(wrap_scalar("prop51",
                                  prop51_bound(n, ab.mean_bound, s),
                                  {{"n", static_cast<double>(n)},
                                   {"M", ab.mean_bound},
                                   {"S", s}}));
  } catch (const hypothesis_error&) {
    BoundReport rep;
    rep.name = "prop51";
    rep.value = std::numeric_limits<double>::quiet_NaN();
    rep.flags.push_back("hypothesis violated: Var|A_0| is infinite");
    reports.push_back(std::move(rep));
  }

  std::cout << "[";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (i) std::cout << ",";
    std::cout << "\n  " << reports[i].to_json();
  }
  std::cout << "\n]\n";
  return 0;
}

int run_sweep_cmd(const std::string& config_path, std::uint64_t* seed,
                  int* n_override, int* trials, double* r, double* t,
                  int* threads, const std::string& out_dir) {
  ExperimentConfig cfg = parse_config_file(config_path);
  if (seed) cfg.master_seed = *seed;
  if (n_override) cfg.degrees = {*n_override};
  if (trials) cfg.trials = *trials;
  if (r) cfg.r = *r;
  if (t) cfg.t = *t;
  if (threads) cfg.threads = *threads;
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  validate(cfg);
  const SweepResult result = run_sweep(cfg);
  export_results(result, cfg, cfg.output_dir);
  render_summary(std::cout, result.rows, result.fit);
  std::cout << "wrote " << cfg.output_dir << "\n";
  return 0;
}

int run_report(const std::string& dir) {
  const std::vector<SummaryRow> rows = load_sweep_csv(dir + "/sweep.csv");
  std::optional<FitResult> fit;
  bool positive = rows.size() >= 3;
  for (const auto& row : rows) positive = positive && row.mean_discrepancy > 0;
  if (positive) fit = fit_decay(rows);
  render_summary(std::cout, rows, fit);

  std::ifstream in(dir + "/summary.json");
  if (in && fit) {
    nlohmann::json j;
    in >> j;
    if (j.contains("fit") && !j["fit"].is_null()) {
      const double slope = j["fit"]["slope"].get<double>();
      const double amp = j["fit"]["amplitude"].get<double>();
      if (std::abs(slope - fit->slope) > 1e-9 ||
          std::abs(amp - fit->amplitude) > 1e-9) {
        std::cerr << "report: fit recomputed from sweep.csv disagrees with "
                     "summary.json\n";
        return 1;
      }
      std::cout << "fit matches summary.json\n";
    }
  }
  return 0;
}

struct VerifyStats {
  long et_pairs = 0;
  long et_failures = 0;
  long root_checks = 0;
  long root_failures = 0;
};

bool conjugate_symmetric(const std::vector<cplx>& roots, double tol) {
  std::vector<bool> used(roots.size(), false);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (used[i]) continue;
    const cplx want = std::conj(roots[i]);
    bool found = false;
    for (std::size_t j = i; j < roots.size(); ++j) {
      if (used[j] && j != i) continue;
      if (j == i && std::abs(roots[i].imag()) > tol) continue;
      if (std::abs(roots[j] - want) <= tol) {
        used[i] = used[j] = true;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

int run_verify(const std::vector<std::string>& ensembles,
               const std::vector<std::string>& bases, int n_max, int trials,
               double r, int sectors, std::uint64_t seed, int threads) {
  std::vector<int> degrees;
  for (int n = 8; n <= n_max; n *= 2) degrees.push_back(n);
  if (degrees.empty()) degrees.push_back(n_max);

  bool all_ok = true;
  for (const std::string& ens_name : ensembles) {
    EnsembleFlags ef;
    ef.family = ens_name;
    if (ens_name == "moving-average") ef.weights = {1.0, 1.0};
    const EnsembleSpec spec = ef.build();
    for (const std::string& basis_name : bases) {
      VerifyStats stats;
      for (int n : degrees) {
        Basis basis = basis_name == "szego"
                          ? szego_orthonormal_basis(
                                WeightSpec::constant_weight(1.0), n)
                          : monomial_basis(n);
        std::vector<AnnularSector> secs;
        {
          ExperimentConfig tmp;
          tmp.r = r;
          tmp.sector_count = sectors;
          tmp.sector_seed = seed + 1;
          secs = make_sectors(tmp);
        }
        std::atomic<int> next{0};
        std::vector<VerifyStats> per_trial(trials);
        auto worker = [&]() {
          for (;;) {
            const int trial = next.fetch_add(1);
            if (trial >= trials) return;
            VerifyStats& st = per_trial[trial];
            CoefficientDraw draw;
            Polynomial poly({cplx(1)});
            bool have = false;
            for (int redraw = 0; redraw < 100 && !have; ++redraw) {
              draw = sample_coefficients(spec, n, {seed, n, trial, redraw});
              try {
                Polynomial cand = assemble_polynomial(draw, basis);
                if (std::abs(cand.constant()) < kUnderflowZero) continue;
                poly = std::move(cand);
                have = true;
              } catch (const degenerate_draw&) {
              }
            }
            if (!have) {
              ++st.root_checks;
              ++st.root_failures;
              continue;
            }
            const RootSet roots = find_roots(poly);
            ++st.root_checks;
            bool ok = roots.reconstruction_error <= 1e-8 &&
                      static_cast<int>(roots.roots.size()) == n;
            bool real_poly = true;
            for (const cplx& c : poly.coeffs()) {
              real_poly = real_poly && c.imag() == 0.0;
            }
            if (real_poly) {
              ok = ok && conjugate_symmetric(roots.roots, 1e-8);
            }
            if (!ok) ++st.root_failures;
            for (const AnnularSector& s : secs) {
              ++st.et_pairs;
              if (sector_discrepancy(roots, s) >
                  erdos_turan_rhs(poly, roots, s)) {
                ++st.et_failures;
              }
            }
          }
        };
        unsigned want = threads > 0
                            ? static_cast<unsigned>(threads)
                            : std::max(1u, std::thread::hardware_concurrency());
        want = std::min<unsigned>(want, static_cast<unsigned>(trials));
        if (want <= 1) {
          worker();
        } else {
          std::vector<std::thread> pool;
          for (unsigned i = 0; i < want; ++i) pool.emplace_back(worker);
          for (auto& th : pool) th.join();
        }
        for (const auto& st : per_trial) {
          stats.et_pairs += st.et_pairs;
          stats.et_failures += st.et_failures;
          stats.root_checks += st.root_checks;
          stats.root_failures += st.root_failures;
        }
      }
      const bool ok = stats.et_failures == 0 && stats.root_failures == 0;
      all_ok = all_ok && ok;
      std::printf("%-18s %-9s et=%ld/%ld roots=%ld/%ld %s\n",
                  ens_name.c_str(), basis_name.c_str(),
                  stats.et_pairs - stats.et_failures, stats.et_pairs,
                  stats.root_checks - stats.root_failures, stats.root_checks,
                  ok ? paint("OK", "32").c_str()
                     : paint("FAIL", "31").c_str());
    }
  }
  std::cout << (all_ok ? paint("verify: PASS", "32")
                       : paint("verify: FAIL", "31"))
            << "\n";
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"random polynomial zeros: sampling, discrepancy, bounds, "
               "Monte Carlo sweeps"};
  app.require_subcommand(1);

  int exit_code = 0;

  // sample
  auto* sample = app.add_subcommand("sample", "draw one coefficient vector");
  EnsembleFlags sample_ens;
  sample_ens.attach(sample);
  std::string sample_config, sample_out;
  int sample_n = 8, sample_trial = 0;
  std::uint64_t sample_seed = 1;
  sample->add_option("--config", sample_config, "take the ensemble from a config file");
  sample->add_option("--n", sample_n, "degree");
  sample->add_option("--seed", sample_seed, "master seed");
  sample->add_option("--trial", sample_trial, "trial index");
  sample->add_option("--out", sample_out, "output file (default stdout)");
  sample->callback([&]() {
    exit_code = run_sample(sample_ens, sample_config, sample_n, sample_seed,
                           sample_trial, sample_out);
  });

  // roots
  auto* roots = app.add_subcommand("roots", "find all zeros of a polynomial");
  std::string roots_coeffs, roots_in;
  double roots_tol = 1e-12;
  int roots_iter = 200;
  roots->add_option("--coeffs", roots_coeffs,
                    "coefficients as re,im,re,im,... (c_0 first)");
  roots->add_option("--in", roots_in, "file with one coefficient CSV row");
  roots->add_option("--tol", roots_tol, "relative step tolerance");
  roots->add_option("--max-iter", roots_iter, "iteration cap");
  roots->callback([&]() {
    exit_code = run_roots(roots_coeffs, roots_in, roots_tol, roots_iter);
  });

  // discrepancy
  auto* disc = app.add_subcommand(
      "discrepancy", "sector measure, discrepancy and the per-sample bound");
  std::string disc_coeffs, disc_in;
  double disc_r = 0.5, disc_alpha = 0.0, disc_beta = kPi;
  disc->add_option("--coeffs", disc_coeffs, "coefficients re,im,...");
  disc->add_option("--in", disc_in, "file with one coefficient CSV row");
  disc->add_option("--r", disc_r, "sector radius parameter in (0,1)");
  disc->add_option("--alpha", disc_alpha, "sector start angle");
  disc->add_option("--beta", disc_beta, "sector end angle");
  disc->callback([&]() {
    exit_code = run_discrepancy(disc_coeffs, disc_in, disc_r, disc_alpha,
                                disc_beta);
  });

  // bounds
  auto* bounds = app.add_subcommand(
      "bounds", "evaluate the theoretical bounds for an ensemble");
  EnsembleFlags bounds_ens;
  bounds_ens.attach(bounds);
  int bounds_n = 0;
  double bounds_t = 1.0, bounds_r = 0.5;
  bounds->add_option("--n", bounds_n, "degree")->required();
  bounds->add_option("--t", bounds_t, "moment order");
  bounds->add_option("--r", bounds_r, "sector radius parameter");
  bounds->callback([&]() {
    exit_code = run_bounds(bounds_ens, bounds_n, bounds_t, bounds_r);
  });

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run a Monte Carlo sweep");
  std::string sweep_config, sweep_out;
  std::uint64_t sweep_seed = 0;
  int sweep_n = 0, sweep_trials = 0, sweep_threads = -1;
  double sweep_r = 0, sweep_t = 0;
  sweep->add_option("--config", sweep_config, "experiment config file")
      ->required();
  auto* o_seed = sweep->add_option("--seed", sweep_seed, "override master seed");
  auto* o_n = sweep->add_option("--n", sweep_n, "override degrees with one degree");
  auto* o_trials = sweep->add_option("--trials", sweep_trials, "override trials");
  auto* o_r = sweep->add_option("--r", sweep_r, "override sector radius");
  auto* o_t = sweep->add_option("--t", sweep_t, "override moment order");
  auto* o_threads =
      sweep->add_option("--threads", sweep_threads, "worker threads, 0 = auto");
  sweep->add_option("--out", sweep_out, "override output directory");
  sweep->callback([&]() {
    exit_code = run_sweep_cmd(sweep_config,
                              o_seed->count() ? &sweep_seed : nullptr,
                              o_n->count() ? &sweep_n : nullptr,
                              o_trials->count() ? &sweep_trials : nullptr,
                              o_r->count() ? &sweep_r : nullptr,
                              o_t->count() ? &sweep_t : nullptr,
                              o_threads->count() ? &sweep_threads : nullptr,
                              sweep_out);
  });

  // verify
  auto* verify = app.add_subcommand(
      "verify", "run the per-sample inequality suite; exit 0 only on 100%");
  std::vector<std::string> verify_ens = {"complex-gaussian", "rademacher",
                                         "uniform-disk"};
  std::vector<std::string> verify_bases = {"monomial", "szego"};
  int verify_nmax = 64, verify_trials = 50, verify_sectors = 8,
      verify_threads = 0;
  double verify_r = 0.5;
  std::uint64_t verify_seed = 1;
  verify->add_option("--ensemble", verify_ens, "families to check");
  verify->add_option("--basis", verify_bases, "bases to check (monomial, szego)");
  verify->add_option("--n-max", verify_nmax, "largest dyadic degree");
  verify->add_option("--trials", verify_trials, "trials per degree");
  verify->add_option("--r", verify_r, "sector radius parameter");
  verify->add_option("--sectors", verify_sectors, "random sectors per trial");
  verify->add_option("--seed", verify_seed, "master seed");
  verify->add_option("--threads", verify_threads, "worker threads, 0 = auto");
  verify->callback([&]() {
    exit_code = run_verify(verify_ens, verify_bases, verify_nmax,
                           verify_trials, verify_r, verify_sectors,
                           verify_seed, verify_threads);
  });

  // report
  auto* report =
      app.add_subcommand("report", "re-render a previously written sweep");
  std::string report_dir;
  report->add_option("--dir", report_dir, "sweep output directory")->required();
  report->callback([&]() { exit_code = run_report(report_dir); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const config_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const hypothesis_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_code;
}
