#pragma once

#include <string>
#include <vector>

#include "rpz/common.hpp"

namespace rpz {

// Dense complex polynomial c_0 + c_1 z + ... + c_n z^n with c_n != 0.
// The degree is the index of the last nonzero coefficient; exact trailing
// zeros are trimmed on construction.
class Polynomial {
 public:
  explicit Polynomial(std::vector<cplx> coeffs);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<cplx>& coeffs() const { return coeffs_; }
  const cplx& operator[](int k) const { return coeffs_[k]; }
  cplx constant() const { return coeffs_.front(); }
  cplx leading() const { return coeffs_.back(); }
  double abs_coeff_sum() const;

 private:
  std::vector<cplx> coeffs_;
};

cplx evaluate(const Polynomial& p, cplx z);

// Certified enclosure of sup_{|z|=1} |P|. lo is the max over
// grid_factor * max(n,1) equispaced points; hi applies the Ehlich-Zeller
// factor sec(n*pi/(2N)) for the degree-n trigonometric modulus and is
// clamped above by sum |c_k|.
struct SupNormInterval {
  double lo = 0.0;
  double hi = 0.0;
};
SupNormInterval sup_norm_circle(const Polynomial& p, int grid_factor = 32);

struct RootSet {
  std::vector<cplx> roots;         // Z_1..Z_n with multiplicity
  std::vector<double> residuals;   // |P(Z_i)| / (sum|c_k| * max(1,|Z_i|)^n)
  double reconstruction_error = 0.0;  // rel. coeff distance to c_n*prod(z-Z_i)
};

// Aberth-Ehrlich simultaneous iteration. Escalates once to long double
// accumulation with a different start rotation before giving up.
RootSet find_roots(const Polynomial& p, double tol = 1e-12, int max_iter = 200);

// Logarithmic Mahler measure via Jensen's formula:
//   m(P) = log|c_n| + sum_k log max(1, |Z_k|).
double mahler_measure(const Polynomial& p, const RootSet& roots);

struct NormalizedPolynomial {
  Polynomial scaled;  // P / sqrt(|c_0 c_n|)
  double log_scale;   // (1/2) log|c_0 c_n|
};
NormalizedPolynomial normalize_by_endpoints(const Polynomial& p);

// Fixture format: one CSV row of interleaved real/imaginary parts.
std::string polynomial_to_csv_row(const Polynomial& p);
Polynomial polynomial_from_csv_row(const std::string& line);

}  // namespace rpz
