#include "rpz/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace rpz {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

double compute_catalan() {
  // Partial sums of the alternating series, then iterated pairwise
  // averaging (Euler acceleration); error decays geometrically in levels.
  constexpr int kTerms = 56;
  double row[kTerms];
  double s = 0;
  for (int k = 0; k < kTerms; ++k) {
    const double term = 1.0 / ((2.0 * k + 1.0) * (2.0 * k + 1.0));
    s += (k % 2 == 0) ? term : -term;
    row[k] = s;
  }
  for (int level = 1; level < kTerms; ++level) {
    for (int i = 0; i + level < kTerms; ++i) {
      row[i] = 0.5 * (row[i] + row[i + 1]);
    }
  }
  return row[0];
}

bool finite_log_input(double v) { return v > -kInf && !std::isnan(v); }

// Shared tail of the discrepancy evaluators: given the bracket value
// (so that x = bracket / n), emit C_r sqrt(x) when the absorption is valid
// (x <= 1) and the exact two-term expectation bound otherwise.
void finish_discrepancy_report(BoundReport& rep, int n, double bracket,
                               double r) {
  const double x = std::max(0.0, bracket) / n;
  const double combined = c_r(r) * std::sqrt(x);
  const double two_term =
      std::sqrt(kTwoPi / catalan()) * std::sqrt(x) + 2.0 / (1.0 - r) * x;
  rep.inputs.emplace_back("x", x);
  rep.inputs.emplace_back("combined", combined);
  rep.inputs.emplace_back("two_term", two_term);
  if (x <= 1.0) {
    rep.value = combined;
  } else {
    rep.value = two_term;
    rep.flags.push_back("combined-form precondition x<=1 unmet");
  }
}

}  // namespace

double catalan() {
  static const double value = compute_catalan();
  return value;
}

double c_r(double r) {
  if (!(r > 0.0 && r < 1.0)) throw config_error("c_r: r must lie in (0,1)");
  return std::sqrt(kTwoPi / catalan()) + 2.0 / (1.0 - r);
}

bool BoundReport::hypothesis_violated() const {
  for (const auto& f : flags) {
    if (f.rfind("hypothesis", 0) == 0) return true;
  }
  return false;
}

std::string BoundReport::to_json() const {
  std::string out = "{\"name\":\"" + name + "\",\"value\":";
  char buf[64];
  if (std::isnan(value)) {
    out += "null";
  } else {
    std::snprintf(buf, sizeof buf, "%.17g", value);
    out += buf;
  }
  out += ",\"flags\":[";
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (i) out.push_back(',');
    out += "\"" + flags[i] + "\"";
  }
  out += "],\"inputs\":{";
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (i) out.push_back(',');
    out += "\"" + inputs[i].first + "\":";
    if (std::isnan(inputs[i].second)) {
      out += "null";
    } else {
      std::snprintf(buf, sizeof buf, "%.17g", inputs[i].second);
      out += buf;
    }
  }
  out += "}}";
  return out;
}

BoundReport thm21_bound(int n, double t, double sum_moments, double elog_a0,
                        double elog_an, double r) {
  if (n < 1) throw config_error("thm21_bound: n must be >= 1");
  if (!(t > 0)) throw config_error("thm21_bound: t must be positive");
  BoundReport rep;
  rep.name = "thm21";
  rep.inputs = {{"n", static_cast<double>(n)},
                {"t", t},
                {"sum_moments", sum_moments},
                {"elog_a0", elog_a0},
                {"elog_an", elog_an},
                {"r", r}};
  if (!std::isfinite(sum_moments)) {
    rep.value = kNaN;
    rep.flags.push_back("hypothesis violated: sum of E|A_k|^t is infinite");
    return rep;
  }
  if (!finite_log_input(elog_a0) || !finite_log_input(elog_an)) {
    rep.value = kNaN;
    rep.flags.push_back("hypothesis violated: E[log|A_0 A_n|] = -inf");
    return rep;
  }
  double bracket =
      std::log(sum_moments) / t - 0.5 * (elog_a0 + elog_an);
  if (t > 1.0) {
    bracket += (1.0 - 1.0 / t) * std::log(static_cast<double>(n) + 1.0);
    rep.flags.push_back("t>1 extension");
  }
  finish_discrepancy_report(rep, n, bracket, r);
  return rep;
}

BoundReport cor22_bound(int n, double t, double m_sup, double l_inf,
                        double r) {
  if (n < 1) throw config_error("cor22_bound: n must be >= 1");
  if (!(t > 0)) throw config_error("cor22_bound: t must be positive");
  BoundReport rep;
  rep.name = "cor22";
  rep.inputs = {{"n", static_cast<double>(n)},
                {"t", t},
                {"m_sup", m_sup},
                {"l_inf", l_inf},
                {"r", r}};
  if (!std::isfinite(m_sup)) {
    rep.value = kNaN;
    rep.flags.push_back("hypothesis violated: uniform moment bound infinite");
    return rep;
  }
  if (!finite_log_input(l_inf)) {
    rep.value = kNaN;
    rep.flags.push_back("hypothesis violated: uniform log-moment floor -inf");
    return rep;
  }
  const double np1 = static_cast<double>(n) + 1.0;
  double bracket = (std::log(np1) + std::log(m_sup)) / t - l_inf;
  if (t > 1.0) {
    bracket += (1.0 - 1.0 / t) * std::log(np1);
    rep.flags.push_back("t>1 extension");
  }
  finish_discrepancy_report(rep, n, bracket, r);
  return rep;
}

double prop23_bound(double d, double t, double sum_moments,
                    double elog_a0an) {
  if (!(d > 0)) throw config_error("prop23_bound: d must be positive");
  if (!(t > 0)) throw config_error("prop23_bound: t must be positive");
  return (d + 1.0) / d * (2.0 / t * std::log(sum_moments) - elog_a0an);
}

double prop25_expected(int n, double rho) {
  if (!(rho > 0.0 && rho <= 2.0)) {
    throw config_error("prop25_expected: rho must lie in (0,2]");
  }
  return 2.0 * std::asin(rho / 2.0) / kPi * n;
}

BoundReport thm31_bound(int n, double t, double sum_moments,
                        double max_basis_sup, double elog_dn_floor, double r) {
  if (n < 1) throw config_error("thm31_bound: n must be >= 1");
  if (!(t > 0)) throw config_error("thm31_bound: t must be positive");
  if (!(max_basis_sup > 0)) {
    throw config_error("thm31_bound: basis sup norm must be positive");
  }
  BoundReport rep;
  rep.name = "thm31";
  rep.inputs = {{"n", static_cast<double>(n)},
                {"t", t},
                {"sum_moments", sum_moments},
                {"max_basis_sup", max_basis_sup},
                {"elog_dn_floor", elog_dn_floor},
                {"r", r}};
  if (!std::isfinite(sum_moments)) {
    rep.value = kNaN;
    rep.flags.push_back("hypothesis violated: sum of E|A_k|^t is infinite");
    return rep;
  }
  if (!finite_log_input(elog_dn_floor)) {
    rep.value = kNaN;
    rep.flags.push_back("hypothesis violated: E[log|D_n|] floor is -inf");
    return rep;
  }
  double bracket = std::log(sum_moments) / t + std::log(max_basis_sup) -
                   0.5 * elog_dn_floor;
  if (t > 1.0) {
    bracket += (1.0 - 1.0 / t) * std::log(static_cast<double>(n) + 1.0);
    rep.flags.push_back("t>1 extension");
  }
  finish_discrepancy_report(rep, n, bracket, r);
  return rep;
}

double prop41_bound(int n, double t, double mu) {
  if (n < 0) throw config_error("prop41_bound: n must be >= 0");
  if (!(t > 0)) throw config_error("prop41_bound: t must be positive");
  if (!(mu > 0) || !std::isfinite(mu)) {
    throw hypothesis_error("prop41_bound: mu must be positive and finite");
  }
  return (std::log(static_cast<double>(n) + 1.0) + std::log(mu)) / t;
}

double prop51_bound(int n, double m, double s) {
  if (n < 0) throw config_error("prop51_bound: n must be >= 0");
  if (!(m >= 0) || !(s >= 0)) {
    throw config_error("prop51_bound: M and S must be nonnegative");
  }
  return m + std::sqrt(4.0 * m * m + s * s) *
                 std::sqrt(static_cast<double>(n) + 1.0);
}

double arnold_groeneveld_bound(std::span<const double> c,
                               std::span<const double> mu,
                               std::span<const double> sigma) {
  const std::size_t n = c.size();
  if (n < 1 || mu.size() != n || sigma.size() != n) {
    throw config_error("arnold_groeneveld_bound: inputs must have equal "
                       "length >= 1");
  }
  double cbar = 0, mubar = 0;
  for (std::size_t i = 0; i < n; ++i) {
    cbar += c[i];
    mubar += mu[i];
  }
  cbar /= static_cast<double>(n);
  mubar /= static_cast<double>(n);
  double sc = 0, sm = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sc += (c[i] - cbar) * (c[i] - cbar);
    sm += (mu[i] - mubar) * (mu[i] - mubar) + sigma[i] * sigma[i];
  }
  return std::sqrt(sc * sm);
}

BoundReport thm52_bound(int n, double elog_a0, double elog_an, double m,
                        double s, double r) {
  if (n < 1) throw config_error("thm52_bound: n must be >= 1");
  if (!(m >= 0) || !(s >= 0)) {
    throw config_error("thm52_bound: M and S must be nonnegative");
  }
  BoundReport rep;
  rep.name = "thm52";
  rep.inputs = {{"n", static_cast<double>(n)},
                {"elog_a0", elog_a0},
                {"elog_an", elog_an},
                {"M", m},
                {"S", s},
                {"r", r}};
  rep.flags.push_back(
      "explicit Y_n chain replaces asymptotic (3/2)log(n+1)+O(1)");
  if (!std::isfinite(m) || !std::isfinite(s)) {
    rep.value = kNaN;
    rep.flags.push_back("hypothesis violated: uniform moment bounds infinite");
    return rep;
  }
  if (!finite_log_input(elog_a0) || !finite_log_input(elog_an)) {
    rep.value = kNaN;
    rep.flags.push_back("hypothesis violated: E[log|A_0 A_n|] = -inf");
    return rep;
  }
  const double np1 = static_cast<double>(n) + 1.0;
  const double elog_sup =
      std::log(np1) + std::log(prop51_bound(n, m, s));
  const double bracket = elog_sup - 0.5 * elog_a0 - 0.5 * elog_an;
  finish_discrepancy_report(rep, n, bracket, r);
  return rep;
}

}  // namespace rpz
