#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rpz/common.hpp"

namespace rpz {

// Catalan's constant k = sum_{j>=0} (-1)^j / (2j+1)^2, accelerated by
// iterated pairing of the alternating partial sums.
double catalan();

// C_r = sqrt(2 pi / k) + 2 / (1 - r)
double c_r(double r);

// One evaluated theoretical bound. value is NaN exactly when a
// hypothesis-violation flag is present.
struct BoundReport {
  std::string name;
  double value = 0.0;
  std::vector<std::string> flags;
  std::vector<std::pair<std::string, double>> inputs;

  bool hypothesis_violated() const;
  std::string to_json() const;  // one object: name, value, flags, inputs
};

// Expected-discrepancy bound from the coefficient moments:
//   C_r sqrt( (1/n) [ (1/t) log sum_k E|A_k|^t - (1/2) E log|A_0 A_n| ] ).
// For t > 1 a power-mean correction (1 - 1/t) log(n+1) is added inside the
// bracket and flagged. When the bracket/n exceeds 1 the absorption into
// C_r sqrt(x) is invalid and the exact two-term form is reported instead.
BoundReport thm21_bound(int n, double t, double sum_moments, double elog_a0,
                        double elog_an, double r);

// Uniform-bound variant: sum of moments replaced by (n+1) M, log moments by
// the floor L; O(sqrt(log n / n)) in n.
BoundReport cor22_bound(int n, double t, double m_sup, double l_inf, double r);

// Expected zeros in a compact set at distance d from the unit circle:
//   ((d+1)/d) ( (2/t) log sum_k E|A_k|^t - E log|A_0 A_n| ).
double prop23_bound(double d, double t, double sum_moments, double elog_a0an);

// Leading term of the expected zero count in a disk of radius rho centered
// on the unit circle: (2/pi) arcsin(rho/2) n.
double prop25_expected(int n, double rho);

// General-basis variant with the basis sup-norm term and the floor
// log|b_00 b_nn| + E log|A_n| + L for E log|D_n|.
BoundReport thm31_bound(int n, double t, double sum_moments,
                        double max_basis_sup, double elog_dn_floor, double r);

// E[log Y_n] <= (log(n+1) + log mu) / t for mu = E|A_0|^t.
double prop41_bound(int n, double t, double mu);

// E[Y_n] <= M + sqrt(4 M^2 + S^2) sqrt(n+1).
double prop51_bound(int n, double m, double s);

// Order-statistic bound: | E sum c_i (X_{i:n} - mean mu) | <=
// sqrt( sum (c_i - cbar)^2 * sum [ (mu_i - mubar)^2 + sigma_i^2 ] ).
double arnold_groeneveld_bound(std::span<const double> c,
                               std::span<const double> mu,
                               std::span<const double> sigma);

// Dependent-coefficient bound via the explicit order-statistic chain
//   E log||P_n|| <= log(n+1) + log( M + sqrt(4M^2+S^2) sqrt(n+1) ),
// replacing the asymptotic (3/2) log(n+1) + O(1) form.
BoundReport thm52_bound(int n, double elog_a0, double elog_an, double m,
                        double s, double r);

}  // namespace rpz
