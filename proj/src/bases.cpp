#include "rpz/bases.hpp"

#include <algorithm>
#include <cmath>

namespace rpz {

WeightSpec WeightSpec::constant_weight(double c) {
  WeightSpec w;
  w.form = Form::constant;
  w.c = c;
  validate(w);
  return w;
}

WeightSpec WeightSpec::trig_poly_weight(std::vector<double> fourier) {
  WeightSpec w;
  w.form = Form::trig_poly;
  w.fourier = std::move(fourier);
  validate(w);
  return w;
}

double weight_value(const WeightSpec& w, double theta) {
  if (w.form == WeightSpec::Form::constant) return w.c;
  double v = w.fourier.empty() ? 0.0 : w.fourier[0];
  for (std::size_t j = 1; j < w.fourier.size(); ++j) {
    v += 2.0 * w.fourier[j] * std::cos(static_cast<double>(j) * theta);
  }
  return v;
}

void validate(const WeightSpec& w) {
  if (w.form == WeightSpec::Form::constant) {
    if (!(w.c > 0) || !std::isfinite(w.c)) {
      throw config_error("constant weight must be positive");
    }
    return;
  }
  if (w.fourier.empty()) {
    throw config_error("trig-poly weight needs Fourier coefficients");
  }
  constexpr int kGrid = 4096;
  for (int i = 0; i < kGrid; ++i) {
    if (!(weight_value(w, kTwoPi * i / kGrid) > 0)) {
      throw config_error("trig-poly weight is not strictly positive");
    }
  }
}

Basis::Basis(Kind kind, int degree)
    : kind_(kind), n_(degree), table_(offset(degree) + degree + 1, cplx(0)) {
  if (degree < 0) throw config_error("basis degree must be >= 0");
}

Polynomial Basis::column(int k) const {
  std::vector<cplx> coeffs(table_.begin() + offset(k),
                           table_.begin() + offset(k) + k + 1);
  return Polynomial(std::move(coeffs));
}

Basis monomial_basis(int n) {
  Basis b(Basis::Kind::monomial, n);
  for (int k = 0; k <= n; ++k) b.coeff(k, k) = 1.0;
  return b;
}

std::vector<cplx> trig_moments(const WeightSpec& w, int m) {
  if (m < 0) throw config_error("trig_moments: m must be >= 0");
  validate(w);
  std::vector<cplx> mu(m + 1, cplx(0));
  if (w.form == WeightSpec::Form::constant) {
    mu[0] = kTwoPi * w.c;
    return mu;
  }
  // integral e^{-ij theta} * 2 a_j cos(j theta) = 2 pi a_j
  for (int j = 0; j <= m; ++j) {
    if (j < static_cast<int>(w.fourier.size())) mu[j] = kTwoPi * w.fourier[j];
  }
  return mu;
}

Basis szego_orthonormal_basis(const WeightSpec& w, int n) {
  const std::vector<cplx> mu = trig_moments(w, n + 1);
  auto mu_at = [&](int j) -> cplx {
    // mu_{-j} = conj(mu_j) for a real weight
    return j >= 0 ? mu[j] : std::conj(mu[-j]);
  };

  // monic orthogonal polynomials: Phi_{k+1} = z Phi_k - conj(a_k) Phi_k^*
  // with reflection coefficient conj(a_k) = <z Phi_k, 1> / ||Phi_k||^2
  // (using <Phi_k^*, 1> = ||Phi_k||^2).
  std::vector<std::vector<cplx>> phi(n + 1);
  std::vector<double> norm_sq(n + 1);
  phi[0] = {cplx(1)};
  norm_sq[0] = mu[0].real();
  if (!(norm_sq[0] > 0)) {
    throw conditioning_error("szego basis: total measure is not positive");
  }
  for (int k = 0; k < n; ++k) {
    cplx delta(0);
    for (int j = 0; j <= k; ++j) {
      delta += phi[k][j] * mu_at(-(j + 1));  // <z^{j+1}, 1> = conj(mu_{j+1})
    }
    const cplx refl_conj = delta / norm_sq[k];
    const double rho = 1.0 - std::norm(refl_conj);
    if (!(rho > 1e-14)) {
      throw conditioning_error(
          "szego basis: Toeplitz moment system is numerically singular");
    }
    // reversed conjugate of Phi_k: (Phi_k^*)_j = conj(phi_{k, k-j})
    std::vector<cplx> next(k + 2, cplx(0));
    for (int j = 0; j <= k; ++j) next[j + 1] = phi[k][j];
    for (int j = 0; j <= k; ++j) next[j] -= refl_conj * std::conj(phi[k][k - j]);
    phi[k + 1] = std::move(next);
    norm_sq[k + 1] = norm_sq[k] * rho;
  }

  Basis basis(Basis::Kind::szego, n);
  for (int k = 0; k <= n; ++k) {
    const double inv = 1.0 / std::sqrt(norm_sq[k]);
    for (int j = 0; j <= k; ++j) basis.coeff(j, k) = phi[k][j] * inv;
  }
  return basis;
}

Polynomial assemble_polynomial(const CoefficientDraw& draw,
                               const Basis& basis) {
  const int n = basis.degree();
  if (static_cast<int>(draw.values.size()) != n + 1) {
    throw config_error("assemble_polynomial: draw length != basis degree + 1");
  }
  std::vector<cplx> c(n + 1, cplx(0));
  for (int k = 0; k <= n; ++k) {
    const cplx a = draw.values[k];
    for (int j = 0; j <= k; ++j) c[j] += a * basis.coeff(j, k);
  }
  if (std::abs(c[n]) < kUnderflowZero) {
    throw degenerate_draw("assemble_polynomial: zero leading coefficient");
  }
  return Polynomial(std::move(c));
}

double basis_sup_norm_max(const Basis& basis, int grid_factor) {
  double m = 0;
  for (int k = 0; k <= basis.degree(); ++k) {
    m = std::max(m, sup_norm_circle(basis.column(k), grid_factor).hi);
  }
  return m;
}

namespace {

double residual_at(const Basis& basis, const WeightSpec& w, int nodes) {
  const int n = basis.degree();
  // values of every column at every node
  std::vector<std::vector<cplx>> vals(n + 1);
  std::vector<double> wv(nodes);
  for (int k = 0; k <= n; ++k) vals[k].resize(nodes);
  for (int i = 0; i < nodes; ++i) {
    const double theta = kTwoPi * i / nodes;
    const cplx z = std::polar(1.0, theta);
    wv[i] = weight_value(w, theta);
    for (int k = 0; k <= n; ++k) {
      cplx v = basis.coeff(k, k);
      for (int j = k - 1; j >= 0; --j) v = v * z + basis.coeff(j, k);
      vals[k][i] = v;
    }
  }
  const double dtheta = kTwoPi / nodes;
  double res = 0;
  for (int j = 0; j <= n; ++j) {
    for (int k = j; k <= n; ++k) {
      cplx g(0);
      for (int i = 0; i < nodes; ++i) {
        g += vals[j][i] * std::conj(vals[k][i]) * wv[i];
      }
      g *= dtheta;
      res = std::max(res, std::abs(g - (j == k ? cplx(1) : cplx(0))));
    }
  }
  return res;
}

}  // namespace

double orthonormality_residual(const Basis& basis, const WeightSpec& w,
                               int min_nodes) {
  int nodes = min_nodes;
  double prev = residual_at(basis, w, nodes);
  while (nodes < 1 << 16) {
    nodes *= 2;
    const double cur = residual_at(basis, w, nodes);
    if (std::abs(cur - prev) <= 1e-12) return cur;
    prev = cur;
  }
  return prev;
}

}  // namespace rpz
