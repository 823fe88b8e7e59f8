#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rpz/bases.hpp"
#include "rpz/bounds.hpp"
#include "rpz/ensembles.hpp"
#include "rpz/zerostats.hpp"

namespace rpz {

struct BasisConfig {
  enum class Kind { monomial, szego };
  Kind kind = Kind::monomial;
  WeightSpec weight;
};

struct ExperimentConfig {
  EnsembleSpec ensemble;
  BasisConfig basis;
  std::vector<int> degrees = {16, 32, 64, 128, 256, 512};
  int trials = 200;
  double t = 1.0;  // moment order
  double r = 0.5;  // sector radius parameter
  std::uint64_t master_seed = 1;
  int sector_count = 8;
  std::uint64_t sector_seed = 1;
  std::vector<AnnularSector> explicit_sectors;  // overrides random sectors
  std::vector<RegionSpec> regions;
  std::string output_dir = "out";
  enum class OutputFormat { csv, json, both };
  OutputFormat format = OutputFormat::both;
  int threads = 0;  // 0 = hardware concurrency
};

void validate(const ExperimentConfig& cfg);

// Key = value sections [ensemble] [basis] [sweep] [regions] [output];
// unknown sections and keys are rejected.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

// The sweep's shared sector set: explicit sectors when given, otherwise
// sector_count sectors drawn from sector_seed with the config's r.
std::vector<AnnularSector> make_sectors(const ExperimentConfig& cfg);

struct TrialRecord {
  int n = 0;
  int trial = 0;
  std::vector<double> discrepancy;  // per sector
  std::vector<double> et_rhs;       // per sector
  std::vector<int> region_counts;   // per configured region
  double mahler = 0.0;
  double sup_lo = 0.0;
  double sup_hi = 0.0;
  double abs_c0 = 0.0;
  double abs_cn = 0.0;
  double max_abs_coeff = 0.0;  // Y_n of the accepted draw
  int redraws = 0;
};

// One realization: sample -> assemble -> roots -> statistics, redrawing on
// endpoint degeneracy (c_0 = 0 or c_n = 0) with the redraw sub-index in the
// seed. Enforces discrepancy <= ET right-hand side per sector.
TrialRecord run_trial(const ExperimentConfig& cfg, int n, int trial);

struct SummaryRow {
  int n = 0;
  int trials = 0;
  double mean_discrepancy = 0.0;
  double std_error = 0.0;
  double thm21 = 0.0;
  double cor22 = 0.0;
  double thm31 = 0.0;
  double thm52 = 0.0;
  double mean_disk_fraction = 0.0;
  double prop25_fraction = 0.0;
  double mean_log_yn = 0.0;
  double prop41 = 0.0;
  double mean_yn = 0.0;
  double prop51 = 0.0;
};

struct FitResult {
  double slope = 0.0;       // log mean-discrepancy vs log n
  double intercept = 0.0;
  double slope_residual_rms = 0.0;
  double amplitude = 0.0;   // best a for a sqrt(log n / n)
  double amplitude_rel_residual = 0.0;
};

struct SweepResult {
  std::vector<SummaryRow> rows;
  std::vector<TrialRecord> records;  // ordered by (degree index, trial)
  std::vector<AnnularSector> sectors;
  std::vector<std::vector<BoundReport>> bound_reports;  // per degree
  std::optional<FitResult> fit;
};

SweepResult run_sweep(const ExperimentConfig& cfg);

// Least-squares log-log slope and the fixed-shape a sqrt(log n / n)
// amplitude; needs >= 3 degrees and positive means.
FitResult fit_decay(std::span<const SummaryRow> rows);

// Writes sweep.csv / records.csv (csv or both) and summary.json (json or
// both) into dir; bytes are deterministic in the inputs.
void export_results(const SweepResult& result, const ExperimentConfig& cfg,
                    const std::string& dir);

// Reload of an exported sweep directory for re-rendering.
std::vector<SummaryRow> load_sweep_csv(const std::string& path);
void render_summary(std::ostream& os, std::span<const SummaryRow> rows,
                    const std::optional<FitResult>& fit);

}  // namespace rpz
