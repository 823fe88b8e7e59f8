#pragma once

#include <vector>

#include "rpz/common.hpp"
#include "rpz/ensembles.hpp"
#include "rpz/polycore.hpp"

namespace rpz {

// Weight w(theta) of the orthogonality measure d(mu) = w(theta) d(theta).
// trig_poly stores half-coefficients: w(theta) = a0 + sum_j 2 a_j cos(j theta).
struct WeightSpec {
  enum class Form { constant, trig_poly };
  Form form = Form::constant;
  double c = 1.0;
  std::vector<double> fourier;

  static WeightSpec constant_weight(double c);
  static WeightSpec trig_poly_weight(std::vector<double> fourier);
};

double weight_value(const WeightSpec& w, double theta);
void validate(const WeightSpec& w);  // strict positivity on a 4096 grid

// Lower-triangular coefficient table b_{j,k}; column k holds
// B_k(z) = sum_{j<=k} b_{j,k} z^j with b_{k,k} != 0.
class Basis {
 public:
  enum class Kind { monomial, szego };

  Basis(Kind kind, int degree);

  Kind kind() const { return kind_; }
  int degree() const { return n_; }
  const cplx& coeff(int j, int k) const { return table_[offset(k) + j]; }
  cplx& coeff(int j, int k) { return table_[offset(k) + j]; }
  Polynomial column(int k) const;

 private:
  static std::size_t offset(int k) {
    return static_cast<std::size_t>(k) * (k + 1) / 2;
  }
  Kind kind_;
  int n_;
  std::vector<cplx> table_;
};

Basis monomial_basis(int n);

// Moments mu_j = integral_0^{2pi} e^{-ij theta} w(theta) d(theta), j = 0..m.
// Exact for both weight forms by Fourier orthogonality.
std::vector<cplx> trig_moments(const WeightSpec& w, int m);

// Orthonormal polynomials for d(mu) = w d(theta), built by the Szego/Levinson
// recursion on the Toeplitz moment table (Verblunsky reflection
// coefficients). Leading coefficients are real positive.
Basis szego_orthonormal_basis(const WeightSpec& w, int n);

// P = sum_k A_k B_k in monomial form; throws degenerate_draw when the
// leading coefficient A_n b_{n,n} vanishes.
Polynomial assemble_polynomial(const CoefficientDraw& draw, const Basis& basis);

// max_k of the certified upper end of ||B_k||_inf.
double basis_sup_norm_max(const Basis& basis, int grid_factor = 32);

// max_{j,k} |<B_j, B_k>_w - delta_jk| under periodic trapezoid quadrature,
// node count doubled from min_nodes until the value stabilizes.
double orthonormality_residual(const Basis& basis, const WeightSpec& w,
                               int min_nodes = 4096);

}  // namespace rpz
