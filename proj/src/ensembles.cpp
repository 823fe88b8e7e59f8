#include "rpz/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace rpz {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Nested moving averages collapse to a single moving average over the
// innermost iid base with convolved weights; marginal-law computations work
// on the flattened form.
EnsembleSpec flatten(const EnsembleSpec& spec) {
  if (spec.family != Family::moving_average) return spec;
  EnsembleSpec base = flatten(*spec.base);
  if (base.family != Family::moving_average) {
    EnsembleSpec out = spec;
    out.base = std::make_shared<EnsembleSpec>(base);
    return out;
  }
  const auto& w = spec.weights;
  const auto& v = base.weights;
  std::vector<double> conv(w.size() + v.size() - 1, 0.0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (std::size_t j = 0; j < v.size(); ++j) conv[i + j] += w[i] * v[j];
  }
  EnsembleSpec out;
  out.family = Family::moving_average;
  out.scale = spec.scale * base.scale;
  out.weights = std::move(conv);
  out.base = base.base;
  return out;
}

double l2_norm(const std::vector<double>& w) {
  double s = 0;
  for (double x : w) s += x * x;
  return std::sqrt(s);
}

cplx draw_iid(const EnsembleSpec& spec, SplitMix64& rng) {
  switch (spec.family) {
    case Family::complex_gaussian: {
      // |A|^2 ~ Exp(1), phase uniform
      const double u = rng.uniform_pos();
      const double v = rng.uniform01();
      return std::polar(std::sqrt(-std::log(u)), kTwoPi * v);
    }
    case Family::real_gaussian: {
      const double u = rng.uniform_pos();
      const double v = rng.uniform01();
      return cplx(std::sqrt(-2.0 * std::log(u)) * std::cos(kTwoPi * v), 0.0);
    }
    case Family::uniform_disk: {
      const double u = rng.uniform01();
      const double v = rng.uniform01();
      return std::polar(std::sqrt(u), kTwoPi * v);
    }
    case Family::rademacher:
      return cplx(rng.coin() ? 1.0 : -1.0, 0.0);
    case Family::bernoulli:
      return cplx(rng.uniform01() < spec.p ? 1.0 : 0.0, 0.0);
    case Family::pareto:
      return cplx(std::pow(rng.uniform_pos(), -1.0 / spec.alpha), 0.0);
    case Family::moving_average:
      break;
  }
  throw config_error("draw_iid: not an iid family");
}

void sample_values(const EnsembleSpec& spec, int count, SplitMix64& rng,
                   std::vector<cplx>& out) {
  if (spec.family != Family::moving_average) {
    out.resize(count);
    for (int k = 0; k < count; ++k) out[k] = spec.scale * draw_iid(spec, rng);
    return;
  }
  const int w = spec.window();
  std::vector<cplx> base;
  sample_values(*spec.base, count + w - 1, rng, base);
  out.assign(count, cplx(0));
  for (int k = 0; k < count; ++k) {
    cplx s(0);
    for (int j = 0; j < w; ++j) s += spec.weights[j] * base[k + j];
    out[k] = spec.scale * s;
  }
}

// Atoms of the value distribution for enumerable discrete families
// (real-valued by construction). Scale included.
std::optional<std::vector<std::pair<double, double>>> value_atoms(
    const EnsembleSpec& raw) {
  const EnsembleSpec spec = flatten(raw);
  switch (spec.family) {
    case Family::rademacher:
      return std::vector<std::pair<double, double>>{{spec.scale, 0.5},
                                                    {-spec.scale, 0.5}};
    case Family::bernoulli:
      return std::vector<std::pair<double, double>>{{0.0, 1.0 - spec.p},
                                                    {spec.scale, spec.p}};
    case Family::moving_average: {
      auto base_atoms = value_atoms(*spec.base);
      if (!base_atoms) return std::nullopt;
      const int w = spec.window();
      const std::size_t b = base_atoms->size();
      double combos = 1;
      for (int j = 0; j < w; ++j) combos *= static_cast<double>(b);
      if (combos > 65536.0) return std::nullopt;
      std::vector<std::pair<double, double>> atoms;
      atoms.reserve(static_cast<std::size_t>(combos));
      std::vector<std::size_t> idx(w, 0);
      while (true) {
        double value = 0, prob = 1;
        for (int j = 0; j < w; ++j) {
          value += spec.weights[j] * (*base_atoms)[idx[j]].first;
          prob *= (*base_atoms)[idx[j]].second;
        }
        atoms.emplace_back(spec.scale * value, prob);
        int j = 0;
        for (; j < w; ++j) {
          if (++idx[j] < b) break;
          idx[j] = 0;
        }
        if (j == w) break;
      }
      return atoms;
    }
    default:
      return std::nullopt;
  }
}

// Tail exponent limiting finite absolute moments; +inf when all moments
// exist.
double tail_exponent(const EnsembleSpec& raw) {
  const EnsembleSpec spec = flatten(raw);
  if (spec.family == Family::pareto) return spec.alpha;
  if (spec.family == Family::moving_average) return tail_exponent(*spec.base);
  return kInf;
}

// E[|A|^t] at unit scale for families with a closed form.
std::optional<double> abs_moment_closed(const EnsembleSpec& spec, double t) {
  switch (spec.family) {
    case Family::complex_gaussian:
      return std::tgamma(1.0 + t / 2.0);
    case Family::real_gaussian:
      return std::exp(0.5 * t * std::log(2.0) +
                      std::lgamma((t + 1.0) / 2.0) -
                      0.5 * std::log(kPi));
    case Family::uniform_disk:
      return 2.0 / (t + 2.0);
    case Family::rademacher:
      return 1.0;
    case Family::bernoulli:
      return spec.p;
    case Family::pareto:
      return spec.alpha / (spec.alpha - t);
    case Family::moving_average:
      return std::nullopt;
  }
  return std::nullopt;
}

struct MeanStdErr {
  double mean;
  double std_error;
};

// One independent realization of A_0 per sample (a block draw from a moving
// average would correlate consecutive values and bias the standard error).
void sample_iid_realizations(const EnsembleSpec& spec, long count,
                             SplitMix64& rng, std::vector<cplx>& out) {
  out.resize(count);
  std::vector<cplx> one;
  for (long i = 0; i < count; ++i) {
    sample_values(spec, 1, rng, one);
    out[i] = one[0];
  }
}

template <typename F>
MeanStdErr monte_carlo(const EnsembleSpec& spec, const MonteCarloOptions& mc,
                       F&& statistic) {
  SplitMix64 rng(mix64(mc.seed));
  std::vector<cplx> one;
  double sum = 0, sumsq = 0;
  for (long i = 0; i < mc.samples; ++i) {
    sample_values(spec, 1, rng, one);
    const double x = statistic(one[0]);
    sum += x;
    sumsq += x * x;
  }
  const double n = static_cast<double>(mc.samples);
  const double mean = sum / n;
  const double var = std::max(0.0, sumsq / n - mean * mean);
  return {mean, std::sqrt(var / n)};
}

}  // namespace

Family family_from_name(const std::string& name) {
  if (name == "complex-gaussian") return Family::complex_gaussian;
  if (name == "real-gaussian") return Family::real_gaussian;
  if (name == "uniform-disk") return Family::uniform_disk;
  if (name == "rademacher") return Family::rademacher;
  if (name == "bernoulli") return Family::bernoulli;
  if (name == "pareto") return Family::pareto;
  if (name == "moving-average") return Family::moving_average;
  throw config_error("unknown ensemble family '" + name + "'");
}

std::string family_name(Family f) {
  switch (f) {
    case Family::complex_gaussian: return "complex-gaussian";
    case Family::real_gaussian: return "real-gaussian";
    case Family::uniform_disk: return "uniform-disk";
    case Family::rademacher: return "rademacher";
    case Family::bernoulli: return "bernoulli";
    case Family::pareto: return "pareto";
    case Family::moving_average: return "moving-average";
  }
  return "?";
}

EnsembleSpec EnsembleSpec::iid(Family f, double scale) {
  EnsembleSpec s;
  s.family = f;
  s.scale = scale;
  validate(s);
  return s;
}

EnsembleSpec EnsembleSpec::bernoulli_spec(double p, double scale) {
  EnsembleSpec s;
  s.family = Family::bernoulli;
  s.p = p;
  s.scale = scale;
  validate(s);
  return s;
}

EnsembleSpec EnsembleSpec::pareto_spec(double alpha, double scale) {
  EnsembleSpec s;
  s.family = Family::pareto;
  s.alpha = alpha;
  s.scale = scale;
  validate(s);
  return s;
}

EnsembleSpec EnsembleSpec::moving_average_spec(EnsembleSpec base,
                                               std::vector<double> weights,
                                               double scale) {
  EnsembleSpec s;
  s.family = Family::moving_average;
  s.base = std::make_shared<EnsembleSpec>(std::move(base));
  s.weights = std::move(weights);
  s.scale = scale;
  validate(s);
  return s;
}

void validate(const EnsembleSpec& spec) {
  if (!(spec.scale > 0) || !std::isfinite(spec.scale)) {
    throw config_error("ensemble scale must be positive and finite");
  }
  switch (spec.family) {
    case Family::bernoulli:
      if (!(spec.p > 0.0 && spec.p < 1.0)) {
        throw config_error("bernoulli p must lie in (0,1)");
      }
      break;
    case Family::pareto:
      if (!(spec.alpha > 0.0)) {
        throw config_error("pareto alpha must be positive");
      }
      break;
    case Family::moving_average: {
      if (!spec.base) {
        throw config_error("moving-average needs a base distribution");
      }
      validate(*spec.base);
      if (spec.weights.empty()) {
        throw config_error("moving-average window must be >= 1");
      }
      bool nonzero = false;
      for (double w : spec.weights) nonzero = nonzero || w != 0.0;
      if (!nonzero) {
        throw config_error("moving-average weights must have a nonzero entry");
      }
      break;
    }
    default:
      break;
  }
}

CoefficientDraw sample_coefficients(const EnsembleSpec& spec, int n,
                                    const SeedProvenance& provenance) {
  validate(spec);
  if (n < 0) throw config_error("sample_coefficients: degree must be >= 0");
  SplitMix64 rng(stream_seed(provenance));
  CoefficientDraw draw;
  draw.provenance = provenance;
  sample_values(spec, n + 1, rng, draw.values);
  return draw;
}

MomentEstimate abs_moment(const EnsembleSpec& spec, double t,
                          const MonteCarloOptions& mc) {
  validate(spec);
  if (!(t > 0)) throw config_error("abs_moment: t must be positive");
  if (t >= tail_exponent(spec)) {
    throw hypothesis_error("E[|A|^t] is infinite: t >= pareto tail exponent");
  }
  const EnsembleSpec flat = flatten(spec);
  if (auto closed = abs_moment_closed(flat, t)) {
    return {std::pow(flat.scale, t) * *closed, true, 0.0};
  }
  if (auto atoms = value_atoms(flat)) {
    double m = 0;
    for (const auto& [v, pr] : *atoms) m += pr * std::pow(std::abs(v), t);
    return {m, true, 0.0};
  }
  // moving average of a gaussian base is gaussian again
  if (flat.family == Family::moving_average &&
      (flat.base->family == Family::complex_gaussian ||
       flat.base->family == Family::real_gaussian)) {
    const double sigma = flat.scale * flat.base->scale * l2_norm(flat.weights);
    return {std::pow(sigma, t) * *abs_moment_closed(*flat.base, t), true, 0.0};
  }
  auto est = monte_carlo(flat, mc,
                         [&](cplx a) { return std::pow(std::abs(a), t); });
  return {est.mean, false, est.std_error};
}

namespace {

std::optional<double> log_abs_moment_closed(const EnsembleSpec& spec) {
  switch (spec.family) {
    case Family::complex_gaussian:
      return -kEulerGamma / 2.0;
    case Family::real_gaussian:
      return -(kEulerGamma + std::log(2.0)) / 2.0;
    case Family::uniform_disk:
      return -0.5;
    case Family::rademacher:
      return 0.0;
    case Family::pareto:
      return 1.0 / spec.alpha;
    default:
      return std::nullopt;
  }
}

LogMomentEstimate log_abs_moment_impl(const EnsembleSpec& spec,
                                      const MonteCarloOptions& mc,
                                      bool condition_nonzero) {
  validate(spec);
  const EnsembleSpec flat = flatten(spec);
  if (auto closed = log_abs_moment_closed(flat)) {
    return {std::log(flat.scale) + *closed, true, true, 0.0};
  }
  if (auto atoms = value_atoms(flat)) {
    double zero_mass = 0, mass = 0, sum = 0;
    for (const auto& [v, pr] : *atoms) {
      if (v == 0.0) {
        zero_mass += pr;
      } else {
        mass += pr;
        sum += pr * std::log(std::abs(v));
      }
    }
    if (zero_mass > 0 && !condition_nonzero) {
      return {-kInf, false, true, 0.0};
    }
    return {sum / mass, true, true, 0.0};
  }
  if (flat.family == Family::moving_average &&
      (flat.base->family == Family::complex_gaussian ||
       flat.base->family == Family::real_gaussian)) {
    const double sigma = flat.scale * flat.base->scale * l2_norm(flat.weights);
    return {std::log(sigma) + *log_abs_moment_closed(*flat.base), true, true,
            0.0};
  }
  auto est = monte_carlo(flat, mc, [](cplx a) { return std::log(std::abs(a)); });
  return {est.mean, true, false, est.std_error};
}

}  // namespace

LogMomentEstimate log_abs_moment(const EnsembleSpec& spec,
                                 const MonteCarloOptions& mc) {
  return log_abs_moment_impl(spec, mc, false);
}

LogMomentEstimate log_abs_moment_nonzero(const EnsembleSpec& spec,
                                         const MonteCarloOptions& mc) {
  return log_abs_moment_impl(spec, mc, true);
}

ShiftedLogMomentMin shifted_log_moment_min(const EnsembleSpec& spec,
                                           std::span<const cplx> grid,
                                           const MonteCarloOptions& mc) {
  validate(spec);
  if (grid.empty()) {
    throw config_error("shifted_log_moment_min: empty shift grid");
  }
  // common sample set across shifts
  SplitMix64 rng(mix64(mc.seed));
  std::vector<cplx> samples;
  sample_iid_realizations(spec, mc.samples, rng, samples);
  ShiftedLogMomentMin best;
  best.value = kInf;
  for (const cplx& z : grid) {
    double sum = 0, sumsq = 0;
    for (const cplx& a : samples) {
      const double x = std::log(std::abs(a + z));
      sum += x;
      sumsq += x * x;
    }
    const double n = static_cast<double>(samples.size());
    const double mean = sum / n;
    if (mean < best.value) {
      const double var = std::max(0.0, sumsq / n - mean * mean);
      best.value = mean;
      best.shift = z;
      best.std_error = std::sqrt(var / n);
      if (!std::isfinite(mean)) best.std_error = kInf;
    }
  }
  return best;
}

AbsMomentBounds sup_abs_moments(const EnsembleSpec& spec,
                                const MonteCarloOptions& mc) {
  validate(spec);
  if (tail_exponent(spec) <= 2.0) {
    throw hypothesis_error("Var[|A|] is infinite: pareto tail exponent <= 2");
  }
  const EnsembleSpec flat = flatten(spec);
  const double s = flat.scale;
  switch (flat.family) {
    case Family::complex_gaussian: {
      const double m = std::sqrt(kPi) / 2.0;
      return {s * m, s * s * (1.0 - kPi / 4.0)};
    }
    case Family::real_gaussian: {
      const double m = std::sqrt(2.0 / kPi);
      return {s * m, s * s * (1.0 - 2.0 / kPi)};
    }
    case Family::uniform_disk:
      return {s * 2.0 / 3.0, s * s * (0.5 - 4.0 / 9.0)};
    case Family::rademacher:
      return {s, 0.0};
    case Family::bernoulli:
      return {s * flat.p, s * s * flat.p * (1.0 - flat.p)};
    case Family::pareto: {
      const double a = flat.alpha;
      const double m = a / (a - 1.0);
      return {s * m, s * s * (a / (a - 2.0) - m * m)};
    }
    case Family::moving_average:
      break;
  }
  if (auto atoms = value_atoms(flat)) {
    double m = 0, m2 = 0;
    for (const auto& [v, pr] : *atoms) {
      m += pr * std::abs(v);
      m2 += pr * v * v;
    }
    return {m, m2 - m * m};
  }
  if (flat.base->family == Family::complex_gaussian ||
      flat.base->family == Family::real_gaussian) {
    const double sigma = s * flat.base->scale * l2_norm(flat.weights);
    auto unit = sup_abs_moments(*flat.base);
    const double ubase = flat.base->scale;
    return {sigma / ubase * unit.mean_bound,
            sigma * sigma / (ubase * ubase) * unit.variance_bound};
  }
  auto m1 = monte_carlo(flat, mc, [](cplx a) { return std::abs(a); });
  auto m2 = monte_carlo(flat, mc, [](cplx a) { return std::norm(a); });
  return {m1.mean, std::max(0.0, m2.mean - m1.mean * m1.mean)};
}

bool rotation_invariant(const EnsembleSpec& spec) {
  switch (spec.family) {
    case Family::complex_gaussian:
    case Family::uniform_disk:
      return true;
    case Family::moving_average:
      return rotation_invariant(*spec.base);
    default:
      return false;
  }
}

bool has_discrete_atoms(const EnsembleSpec& spec) {
  return value_atoms(flatten(spec)).has_value();
}

double zero_modulus_atom(const EnsembleSpec& spec) {
  if (auto atoms = value_atoms(flatten(spec))) {
    double mass = 0;
    for (const auto& [v, pr] : *atoms) {
      if (v == 0.0) mass += pr;
    }
    return mass;
  }
  return 0.0;
}

}  // namespace rpz
