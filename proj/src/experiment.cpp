#include "rpz/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace rpz {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

using ojson = nlohmann::ordered_json;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Basis build_basis(const BasisConfig& bc, int n) {
  if (bc.kind == BasisConfig::Kind::monomial) return monomial_basis(n);
  return szego_orthonormal_basis(bc.weight, n);
}

// Hypothesis-aware moment inputs shared by every degree of a sweep.
struct MomentInputs {
  double moment_t = kNaN;        // E|A_0|^t, +inf when the moment diverges
  double elog = -kInf;           // E log|A_0| (-inf on an atom at zero)
  double elog_nonzero = kNaN;    // E log|A_0| conditioned on |A_0| != 0
  bool zero_atom = false;
  double m_bound = kNaN;         // sup_k E|A_k|
  double s_bound = kNaN;         // sqrt(sup_k Var|A_k|)
  bool moments51_ok = false;
  double shift_floor = -kInf;    // L with E log|A_0 + z| >= L
  bool shift_floor_exact = false;
};

MomentInputs compute_moment_inputs(const ExperimentConfig& cfg) {
  MomentInputs mi;
  try {
    mi.moment_t = abs_moment(cfg.ensemble, cfg.t).value;
  } catch (const hypothesis_error&) {
    mi.moment_t = kInf;
  }
  const LogMomentEstimate le = log_abs_moment(cfg.ensemble);
  mi.elog = le.finite ? le.value : -kInf;
  mi.zero_atom = zero_modulus_atom(cfg.ensemble) > 0.0;
  mi.elog_nonzero = log_abs_moment_nonzero(cfg.ensemble).value;
  try {
    const AbsMomentBounds ab = sup_abs_moments(cfg.ensemble);
    mi.m_bound = ab.mean_bound;
    mi.s_bound = std::sqrt(std::max(0.0, ab.variance_bound));
    mi.moments51_ok = true;
  } catch (const hypothesis_error&) {
  }
  // uniform floor for E log|A_0 + z|: exact for rotation-invariant moduli
  // and the real gaussian (both attain the infimum at z = 0), grid-estimated
  // for other continuous families, -inf when the law has atoms (a shift onto
  // an atom sends the log moment to -inf).
  if (rotation_invariant(cfg.ensemble) ||
      cfg.ensemble.family == Family::real_gaussian) {
    mi.shift_floor = mi.elog;
    mi.shift_floor_exact = true;
  } else if (!has_discrete_atoms(cfg.ensemble)) {
    const std::vector<cplx> grid = {
        {0, 0}, {0.5, 0}, {-0.5, 0}, {0, 0.5}, {0, -0.5},
        {1, 0}, {-1, 0},  {0, 1},    {0, -1}};
    mi.shift_floor = shifted_log_moment_min(cfg.ensemble, grid).value;
  }
  return mi;
}

std::vector<BoundReport> degree_bounds(const ExperimentConfig& cfg,
                                       const MomentInputs& mi, int n,
                                       double max_basis_sup,
                                       double log_b00_bnn) {
  std::vector<BoundReport> reports;
  const double sum_moments = (n + 1.0) * mi.moment_t;
  reports.push_back(
      thm21_bound(n, cfg.t, sum_moments, mi.elog, mi.elog, cfg.r));
  reports.push_back(cor22_bound(n, cfg.t, mi.moment_t, mi.elog, cfg.r));
  {
    double floor;
    if (cfg.basis.kind == BasisConfig::Kind::monomial) {
      floor = (mi.elog > -kInf) ? 2.0 * mi.elog : -kInf;
      max_basis_sup = 1.0;
      log_b00_bnn = 0.0;
    } else {
      floor = (mi.elog > -kInf && mi.shift_floor > -kInf)
                  ? log_b00_bnn + mi.elog + mi.shift_floor
                  : -kInf;
    }
    BoundReport rep =
        thm31_bound(n, cfg.t, sum_moments, max_basis_sup, floor, cfg.r);
    if (cfg.basis.kind == BasisConfig::Kind::szego && !mi.shift_floor_exact &&
        mi.shift_floor > -kInf) {
      rep.flags.push_back("L estimated by grid minimum");
    }
    reports.push_back(std::move(rep));
  }
  {
    double e0 = mi.elog, en = mi.elog;
    std::vector<std::string> extra;
    if (mi.zero_atom) {
      e0 = en = mi.elog_nonzero;
      extra.push_back(
          "endpoint log-moment conditioned on nonzero modulus (redraw rule)");
    }
    BoundReport rep = mi.moments51_ok
                          ? thm52_bound(n, e0, en, mi.m_bound, mi.s_bound,
                                        cfg.r)
                          : thm52_bound(n, e0, en, kInf, kInf, cfg.r);
    for (auto& f : extra) rep.flags.push_back(std::move(f));
    reports.push_back(std::move(rep));
  }
  return reports;
}

TrialRecord run_trial_impl(const ExperimentConfig& cfg, const Basis& basis,
                           const std::vector<AnnularSector>& sectors, int n,
                           int trial) {
  TrialRecord rec;
  rec.n = n;
  rec.trial = trial;

  Polynomial poly({cplx(1)});
  CoefficientDraw draw;
  bool have = false;
  for (int redraw = 0; redraw < 100 && !have; ++redraw) {
    draw = sample_coefficients(cfg.ensemble, n,
                               {cfg.master_seed, n, trial, redraw});
    try {
      Polynomial cand = assemble_polynomial(draw, basis);
      if (std::abs(cand.constant()) < kUnderflowZero) {
        throw degenerate_draw("zero constant term");
      }
      poly = std::move(cand);
      have = true;
      rec.redraws = redraw;
    } catch (const degenerate_draw&) {
    }
  }
  if (!have) {
    throw config_error(
        "degenerate ensemble: 100 consecutive draws had a zero endpoint "
        "coefficient");
  }

  const RootSet roots = find_roots(poly);
  const SupNormInterval sup = sup_norm_circle(poly);
  rec.sup_lo = sup.lo;
  rec.sup_hi = sup.hi;
  rec.abs_c0 = std::abs(poly.constant());
  rec.abs_cn = std::abs(poly.leading());
  rec.mahler = mahler_measure(poly, roots);
  for (const cplx& a : draw.values) {
    rec.max_abs_coeff = std::max(rec.max_abs_coeff, std::abs(a));
  }

  std::map<double, double> rhs_by_r;
  rec.discrepancy.reserve(sectors.size());
  rec.et_rhs.reserve(sectors.size());
  for (const AnnularSector& s : sectors) {
    const double d = sector_discrepancy(roots, s);
    auto it = rhs_by_r.find(s.r);
    if (it == rhs_by_r.end()) {
      it = rhs_by_r.emplace(s.r, erdos_turan_rhs(poly, roots, s)).first;
    }
    const double rhs = it->second;
    if (d > rhs) {
      throw std::runtime_error(
          "per-sample Erdos-Turan violation: discrepancy " + fmt17(d) +
          " > bound " + fmt17(rhs));
    }
    rec.discrepancy.push_back(d);
    rec.et_rhs.push_back(rhs);
  }
  rec.region_counts.reserve(cfg.regions.size());
  for (const RegionSpec& rg : cfg.regions) {
    rec.region_counts.push_back(region_count(roots, rg));
  }
  return rec;
}

struct MeanStdErr {
  double mean = kNaN;
  double std_error = kNaN;
};

MeanStdErr mean_stderr(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  double sum = 0;
  for (double x : xs) sum += x;
  const double mean = sum / n;
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace

std::vector<AnnularSector> make_sectors(const ExperimentConfig& cfg) {
  if (!cfg.explicit_sectors.empty()) return cfg.explicit_sectors;
  SplitMix64 rng(mix64(cfg.sector_seed));
  std::vector<AnnularSector> sectors(cfg.sector_count);
  for (auto& s : sectors) {
    s.r = cfg.r;
    s.alpha = kTwoPi * rng.uniform01();
    s.beta = s.alpha + kTwoPi * rng.uniform_pos();
    validate(s);
  }
  return sectors;
}

TrialRecord run_trial(const ExperimentConfig& cfg, int n, int trial) {
  validate(cfg);
  const Basis basis = build_basis(cfg.basis, n);
  return run_trial_impl(cfg, basis, make_sectors(cfg), n, trial);
}

SweepResult run_sweep(const ExperimentConfig& cfg) {
  validate(cfg);
  SweepResult result;
  result.sectors = make_sectors(cfg);
  const MomentInputs mi = compute_moment_inputs(cfg);

  const std::size_t degrees = cfg.degrees.size();
  const std::size_t total = degrees * static_cast<std::size_t>(cfg.trials);
  result.records.resize(total);
  std::vector<std::string> failures(total);

  int disk_index = -1;
  double disk_radius = 0;
  for (std::size_t i = 0; i < cfg.regions.size(); ++i) {
    if (cfg.regions[i].kind == RegionSpec::Kind::disk) {
      disk_index = static_cast<int>(i);
      disk_radius = cfg.regions[i].radius;
      break;
    }
  }

  for (std::size_t di = 0; di < degrees; ++di) {
    const int n = cfg.degrees[di];
    const Basis basis = build_basis(cfg.basis, n);

    // trials fill preassigned slots; the aggregate below reads them in
    // index order, so scheduling cannot change any output
    std::atomic<int> next{0};
    auto worker = [&]() {
      for (;;) {
        const int trial = next.fetch_add(1);
        if (trial >= cfg.trials) return;
        const std::size_t slot = di * cfg.trials + trial;
        try {
          result.records[slot] =
              run_trial_impl(cfg, basis, result.sectors, n, trial);
        } catch (const std::exception& e) {
          failures[slot] = "n=" + std::to_string(n) +
                           " trial=" + std::to_string(trial) + ": " + e.what();
        }
      }
    };
    unsigned want = cfg.threads > 0
                        ? static_cast<unsigned>(cfg.threads)
                        : std::max(1u, std::thread::hardware_concurrency());
    want = std::min<unsigned>(want, static_cast<unsigned>(cfg.trials));
    if (want <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      pool.reserve(want);
      for (unsigned i = 0; i < want; ++i) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }
    for (std::size_t slot = di * cfg.trials;
         slot < (di + 1) * static_cast<std::size_t>(cfg.trials); ++slot) {
      if (!failures[slot].empty()) throw std::runtime_error(failures[slot]);
    }

    double max_basis_sup = 1.0;
    double log_b00_bnn = 0.0;
    if (cfg.basis.kind == BasisConfig::Kind::szego) {
      max_basis_sup = basis_sup_norm_max(basis);
      log_b00_bnn = std::log(std::abs(basis.coeff(0, 0))) +
                    std::log(std::abs(basis.coeff(n, n)));
    }
    result.bound_reports.push_back(
        degree_bounds(cfg, mi, n, max_basis_sup, log_b00_bnn));

    SummaryRow row;
    row.n = n;
    row.trials = cfg.trials;
    std::vector<double> per_trial_disc(cfg.trials);
    std::vector<double> log_yn(cfg.trials), yn(cfg.trials);
    std::vector<double> disk_frac(cfg.trials);
    for (int trial = 0; trial < cfg.trials; ++trial) {
      const TrialRecord& rec = result.records[di * cfg.trials + trial];
      double s = 0;
      for (double d : rec.discrepancy) s += d;
      per_trial_disc[trial] = s / static_cast<double>(rec.discrepancy.size());
      yn[trial] = rec.max_abs_coeff;
      log_yn[trial] = std::log(rec.max_abs_coeff);
      if (disk_index >= 0) {
        disk_frac[trial] =
            static_cast<double>(rec.region_counts[disk_index]) / n;
      }
    }
    const MeanStdErr disc = mean_stderr(per_trial_disc);
    row.mean_discrepancy = disc.mean;
    row.std_error = disc.std_error;
    const auto& reports = result.bound_reports.back();
    row.thm21 = reports[0].value;
    row.cor22 = reports[1].value;
    row.thm31 = reports[2].value;
    row.thm52 = reports[3].value;
    if (disk_index >= 0) {
      row.mean_disk_fraction = mean_stderr(disk_frac).mean;
      row.prop25_fraction = prop25_expected(n, disk_radius) / n;
    } else {
      row.mean_disk_fraction = kNaN;
      row.prop25_fraction = kNaN;
    }
    row.mean_log_yn = mean_stderr(log_yn).mean;
    row.mean_yn = mean_stderr(yn).mean;
    row.prop41 = std::isfinite(mi.moment_t)
                     ? prop41_bound(n, cfg.t, mi.moment_t)
                     : kNaN;
    row.prop51 =
        mi.moments51_ok ? prop51_bound(n, mi.m_bound, mi.s_bound) : kNaN;
    result.rows.push_back(row);
  }

  if (result.rows.size() >= 3) {
    bool positive = true;
    for (const auto& row : result.rows) {
      positive = positive && row.mean_discrepancy > 0;
    }
    if (positive) result.fit = fit_decay(result.rows);
  }
  return result;
}

FitResult fit_decay(std::span<const SummaryRow> rows) {
  if (rows.size() < 3) {
    throw config_error("fit_decay: need at least 3 degrees");
  }
  FitResult fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(rows.size());
  for (const auto& row : rows) {
    if (!(row.mean_discrepancy > 0)) {
      throw config_error("fit_decay: mean discrepancy must be positive");
    }
    const double x = std::log(static_cast<double>(row.n));
    const double y = std::log(row.mean_discrepancy);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss = 0;
  for (const auto& row : rows) {
    const double x = std::log(static_cast<double>(row.n));
    const double y = std::log(row.mean_discrepancy);
    const double e = y - (fit.intercept + fit.slope * x);
    ss += e * e;
  }
  fit.slope_residual_rms = std::sqrt(ss / n);

  // amplitude fit D(n) ~ a sqrt(log n / n), least squares in a
  double num = 0, den = 0, dd = 0;
  for (const auto& row : rows) {
    const double s =
        std::sqrt(std::log(static_cast<double>(row.n)) / row.n);
    num += row.mean_discrepancy * s;
    den += s * s;
    dd += row.mean_discrepancy * row.mean_discrepancy;
  }
  fit.amplitude = num / den;
  double rss = 0;
  for (const auto& row : rows) {
    const double s =
        std::sqrt(std::log(static_cast<double>(row.n)) / row.n);
    const double e = row.mean_discrepancy - fit.amplitude * s;
    rss += e * e;
  }
  fit.amplitude_rel_residual = std::sqrt(rss / dd);
  return fit;
}

namespace {

ojson ensemble_to_json(const EnsembleSpec& spec) {
  ojson j;
  j["family"] = family_name(spec.family);
  j["scale"] = spec.scale;
  if (spec.family == Family::bernoulli) j["p"] = spec.p;
  if (spec.family == Family::pareto) j["alpha"] = spec.alpha;
  if (spec.family == Family::moving_average) {
    j["window"] = spec.window();
    j["weights"] = spec.weights;
    j["base"] = ensemble_to_json(*spec.base);
  }
  return j;
}

ojson config_to_json(const ExperimentConfig& cfg) {
  ojson j;
  j["ensemble"] = ensemble_to_json(cfg.ensemble);
  ojson basis;
  basis["kind"] =
      cfg.basis.kind == BasisConfig::Kind::monomial ? "monomial" : "szego";
  if (cfg.basis.kind == BasisConfig::Kind::szego) {
    if (cfg.basis.weight.form == WeightSpec::Form::constant) {
      basis["weight"] = {{"form", "constant"}, {"c", cfg.basis.weight.c}};
    } else {
      basis["weight"] = {{"form", "trig-poly"},
                         {"fourier", cfg.basis.weight.fourier}};
    }
  }
  j["basis"] = basis;
  j["degrees"] = cfg.degrees;
  j["trials"] = cfg.trials;
  j["t"] = cfg.t;
  j["r"] = cfg.r;
  j["sectors"] = cfg.sector_count;
  j["sector_seed"] = cfg.sector_seed;
  return j;
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write '" + path + "'");
  out << bytes;
  if (!out) throw io_error("write failed for '" + path + "'");
}

const char* kSweepHeader =
    "n,trials,mean_discrepancy,stderr,thm21,cor22,thm31,thm52,"
    "mean_disk_fraction,prop25_fraction,mean_logYn,prop41,mean_Yn,prop51";

}  // namespace

void export_results(const SweepResult& result, const ExperimentConfig& cfg,
                    const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw io_error("cannot create output directory '" + dir +
                   "': " + ec.message());
  }
  const bool csv = cfg.format != ExperimentConfig::OutputFormat::json;
  const bool json = cfg.format != ExperimentConfig::OutputFormat::csv;

  if (csv) {
    std::string sweep = kSweepHeader;
    sweep.push_back('\n');
    for (const auto& row : result.rows) {
      sweep += std::to_string(row.n) + "," + std::to_string(row.trials) + ",";
      sweep += fmt17(row.mean_discrepancy) + "," + fmt17(row.std_error) + ",";
      sweep += fmt17(row.thm21) + "," + fmt17(row.cor22) + ",";
      sweep += fmt17(row.thm31) + "," + fmt17(row.thm52) + ",";
      sweep += fmt17(row.mean_disk_fraction) + "," +
               fmt17(row.prop25_fraction) + ",";
      sweep += fmt17(row.mean_log_yn) + "," + fmt17(row.prop41) + ",";
      sweep += fmt17(row.mean_yn) + "," + fmt17(row.prop51) + "\n";
    }
    write_file(dir + "/sweep.csv", sweep);

    std::string records = "n,trial,sector,discrepancy,et_rhs\n";
    for (const auto& rec : result.records) {
      for (std::size_t s = 0; s < rec.discrepancy.size(); ++s) {
        records += std::to_string(rec.n) + "," + std::to_string(rec.trial) +
                   "," + std::to_string(s) + "," + fmt17(rec.discrepancy[s]) +
                   "," + fmt17(rec.et_rhs[s]) + "\n";
      }
    }
    write_file(dir + "/records.csv", records);
  }

  if (json) {
    ojson j;
    j["master_seed"] = cfg.master_seed;
    j["config"] = config_to_json(cfg);
    ojson sectors = ojson::array();
    for (const auto& s : result.sectors) {
      sectors.push_back({{"r", s.r}, {"alpha", s.alpha}, {"beta", s.beta}});
    }
    j["sectors"] = sectors;
    if (result.fit) {
      j["fit"] = {{"slope", result.fit->slope},
                  {"intercept", result.fit->intercept},
                  {"slope_residual_rms", result.fit->slope_residual_rms},
                  {"amplitude", result.fit->amplitude},
                  {"amplitude_rel_residual",
                   result.fit->amplitude_rel_residual}};
    } else {
      j["fit"] = nullptr;
    }
    ojson rows = ojson::array();
    for (std::size_t di = 0; di < result.rows.size(); ++di) {
      const auto& row = result.rows[di];
      ojson entry;
      entry["n"] = row.n;
      entry["trials"] = row.trials;
      entry["mean_discrepancy"] = row.mean_discrepancy;
      entry["stderr"] = row.std_error;
      entry["mean_logYn"] = row.mean_log_yn;
      entry["mean_Yn"] = row.mean_yn;
      ojson bounds = ojson::array();
      for (const auto& rep : result.bound_reports[di]) {
        bounds.push_back(ojson::parse(rep.to_json()));
      }
      entry["bounds"] = bounds;
      rows.push_back(entry);
    }
    j["degrees"] = rows;
    write_file(dir + "/summary.json", j.dump(2) + "\n");
  }
}

std::vector<SummaryRow> load_sweep_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != kSweepHeader) {
    throw io_error("'" + path + "' does not look like a sweep.csv");
  }
  std::vector<SummaryRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> vals;
    const char* s = line.c_str();
    while (*s) {
      char* end = nullptr;
      vals.push_back(std::strtod(s, &end));
      if (end == s) throw io_error("malformed row in '" + path + "'");
      s = end;
      if (*s == ',') ++s;
    }
    if (vals.size() != 14) throw io_error("malformed row in '" + path + "'");
    SummaryRow row;
    row.n = static_cast<int>(vals[0]);
    row.trials = static_cast<int>(vals[1]);
    row.mean_discrepancy = vals[2];
    row.std_error = vals[3];
    row.thm21 = vals[4];
    row.cor22 = vals[5];
    row.thm31 = vals[6];
    row.thm52 = vals[7];
    row.mean_disk_fraction = vals[8];
    row.prop25_fraction = vals[9];
    row.mean_log_yn = vals[10];
    row.prop41 = vals[11];
    row.mean_yn = vals[12];
    row.prop51 = vals[13];
    rows.push_back(row);
  }
  return rows;
}

void render_summary(std::ostream& os, std::span<const SummaryRow> rows,
                    const std::optional<FitResult>& fit) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%6s %7s %16s %12s %10s %10s %10s %10s\n",
                "n", "trials", "mean_disc", "stderr", "thm21", "cor22",
                "thm31", "thm52");
  os << buf;
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof buf,
                  "%6d %7d %16.8g %12.4g %10.5g %10.5g %10.5g %10.5g\n",
                  row.n, row.trials, row.mean_discrepancy, row.std_error,
                  row.thm21, row.cor22, row.thm31, row.thm52);
    os << buf;
  }
  if (fit) {
    std::snprintf(buf, sizeof buf,
                  "fit: slope=%.6g amplitude=%.6g rel_residual=%.6g\n",
                  fit->slope, fit->amplitude, fit->amplitude_rel_residual);
    os << buf;
  }
}

}  // namespace rpz
