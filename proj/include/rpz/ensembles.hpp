#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "rpz/common.hpp"
#include "rpz/rng.hpp"

namespace rpz {

enum class Family {
  complex_gaussian,  // E|A|^2 = 1; re/im independent N(0, 1/2)
  real_gaussian,     // standard normal
  uniform_disk,      // uniform on the closed unit disk
  rademacher,        // +1 / -1
  bernoulli,         // 1 with probability p, else 0
  pareto,            // P(A > x) = x^-alpha, x >= 1
  moving_average,    // A_k = sum_j w_j G_{k+j} over a shared iid base
};

Family family_from_name(const std::string& name);
std::string family_name(Family f);

struct EnsembleSpec {
  Family family = Family::complex_gaussian;
  double scale = 1.0;
  double p = 0.5;      // bernoulli
  double alpha = 3.0;  // pareto
  std::vector<double> weights;         // moving-average; size == window
  std::shared_ptr<EnsembleSpec> base;  // moving-average base distribution

  int window() const { return static_cast<int>(weights.size()); }

  static EnsembleSpec iid(Family f, double scale = 1.0);
  static EnsembleSpec bernoulli_spec(double p, double scale = 1.0);
  static EnsembleSpec pareto_spec(double alpha, double scale = 1.0);
  static EnsembleSpec moving_average_spec(EnsembleSpec base,
                                          std::vector<double> weights,
                                          double scale = 1.0);
};

void validate(const EnsembleSpec& spec);  // throws config_error

struct CoefficientDraw {
  std::vector<cplx> values;  // A_0..A_n
  SeedProvenance provenance;
};

// Pure in the provenance: identical (master, n, trial, redraw) reproduce the
// sequence bit for bit on any thread.
CoefficientDraw sample_coefficients(const EnsembleSpec& spec, int n,
                                    const SeedProvenance& provenance);

struct MonteCarloOptions {
  long samples = 100000;
  std::uint64_t seed = 0x5eedc0de5eedc0deULL;
};

struct MomentEstimate {
  double value = 0.0;
  bool exact = true;
  double std_error = 0.0;  // zero for exact values
};

// E[|A|^t]. Closed form where one exists, Monte Carlo otherwise.
MomentEstimate abs_moment(const EnsembleSpec& spec, double t,
                          const MonteCarloOptions& mc = {});

struct LogMomentEstimate {
  double value = 0.0;  // -inf when finite == false
  bool finite = true;  // false: the modulus has an atom at zero
  bool exact = true;
  double std_error = 0.0;
};

// E[log|A|]; reports a hypothesis violation instead of a numeric when
// P(|A| = 0) > 0.
LogMomentEstimate log_abs_moment(const EnsembleSpec& spec,
                                 const MonteCarloOptions& mc = {});

// E[log|A|, conditioned on |A| != 0]. Matches log_abs_moment for atom-free
// moduli; finite whenever the spec is valid.
LogMomentEstimate log_abs_moment_nonzero(const EnsembleSpec& spec,
                                         const MonteCarloOptions& mc = {});

struct ShiftedLogMomentMin {
  double value = 0.0;
  cplx shift;  // grid point attaining the minimum
  double std_error = 0.0;
};

// Grid minimum of Monte Carlo estimates of E[log|A + z|]; an upper estimate
// of the uniform floor, not a proven infimum.
ShiftedLogMomentMin shifted_log_moment_min(const EnsembleSpec& spec,
                                           std::span<const cplx> grid,
                                           const MonteCarloOptions& mc = {});

struct AbsMomentBounds {
  double mean_bound = 0.0;      // sup_k E|A_k|
  double variance_bound = 0.0;  // sup_k Var|A_k|
};

// Uniform first/second moment bounds of |A_k|; single-variable values for
// iid families, computed from the weight vector for moving averages.
AbsMomentBounds sup_abs_moments(const EnsembleSpec& spec,
                                const MonteCarloOptions& mc = {});

// True when the law of A is invariant under multiplication by e^{i phi}
// (then inf_z E[log|A+z|] is attained at z = 0).
bool rotation_invariant(const EnsembleSpec& spec);

// True for discrete-valued specs whose atoms the module can enumerate
// (rademacher, bernoulli, small moving averages over them).
bool has_discrete_atoms(const EnsembleSpec& spec);

// P(|A| = 0) for enumerable discrete moduli; 0 for continuous families.
double zero_modulus_atom(const EnsembleSpec& spec);

}  // namespace rpz
