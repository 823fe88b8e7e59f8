#include "rpz/polycore.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

namespace rpz {

namespace {

template <typename Real>
using cx = std::complex<Real>;

// Evaluate p and p' at z in one Horner pass.
template <typename Real>
void horner2(const std::vector<cx<Real>>& c, cx<Real> z, cx<Real>& p,
             cx<Real>& dp) {
  const int n = static_cast<int>(c.size()) - 1;
  p = c[n];
  dp = cx<Real>(0);
  for (int k = n - 1; k >= 0; --k) {
    dp = dp * z + p;
    p = p * z + c[k];
  }
}

// Newton correction p/p' at z. For |z| > 1 the reversed polynomial
// q(w) = sum c_{n-k} w^k is evaluated at w = 1/z, which avoids overflow:
//   p(z) = z^n q(w),  p/p' = z q / (n q - w q').
template <typename Real>
bool newton_correction(const std::vector<cx<Real>>& c,
                       const std::vector<cx<Real>>& crev, cx<Real> z,
                       cx<Real>& correction, bool& derivative_zero) {
  const int n = static_cast<int>(c.size()) - 1;
  derivative_zero = false;
  if (std::abs(z) <= Real(1)) {
    cx<Real> p, dp;
    horner2(c, z, p, dp);
    if (p == cx<Real>(0)) return true;
    if (dp == cx<Real>(0)) {
      derivative_zero = true;
      return false;
    }
    correction = p / dp;
    return false;
  }
  const cx<Real> w = Real(1) / z;
  cx<Real> q, dq;
  horner2(crev, w, q, dq);
  if (q == cx<Real>(0)) return true;
  const cx<Real> denom = Real(n) * q - w * dq;
  if (denom == cx<Real>(0)) {
    derivative_zero = true;
    return false;
  }
  correction = z * q / denom;
  return false;
}

// Initial root-modulus estimates from the upper convex hull of
// (k, log|c_k|) (Newton polygon); each hull segment of horizontal span g
// contributes g points on the circle of radius |c_a/c_b|^(1/g). Angles are
// equispaced within a segment with a fixed rotation offset so no starting
// point lies on a symmetry axis of common test polynomials.
template <typename Real>
std::vector<cx<Real>> initial_guesses(const std::vector<cx<Real>>& c,
                                      double angle_offset) {
  const int n = static_cast<int>(c.size()) - 1;
  std::vector<int> ks;
  std::vector<double> hs;
  ks.reserve(n + 1);
  hs.reserve(n + 1);
  for (int k = 0; k <= n; ++k) {
    if (c[k] != cx<Real>(0)) {
      ks.push_back(k);
      hs.push_back(std::log(static_cast<double>(std::abs(c[k]))));
    }
  }
  std::vector<int> hull;  // indices into ks/hs
  for (int idx = 0; idx < static_cast<int>(ks.size()); ++idx) {
    while (hull.size() >= 2) {
      const int a = hull[hull.size() - 2];
      const int b = hull[hull.size() - 1];
      const double cross =
          (ks[b] - ks[a]) * (hs[idx] - hs[a]) -
          (ks[idx] - ks[a]) * (hs[b] - hs[a]);
      if (cross >= 0) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(idx);
  }
  std::vector<cx<Real>> z;
  z.reserve(n);
  for (std::size_t seg = 0; seg + 1 < hull.size(); ++seg) {
    const int a = ks[hull[seg]];
    const int b = ks[hull[seg + 1]];
    const int g = b - a;
    double radius = std::exp((hs[hull[seg]] - hs[hull[seg + 1]]) / g);
    radius = std::clamp(radius, 1e-150, 1e150);
    for (int j = 0; j < g; ++j) {
      const double ang = kTwoPi * (j + 0.5) / g + angle_offset + 0.5 * a;
      z.push_back(std::polar(static_cast<Real>(radius), static_cast<Real>(ang)));
    }
  }
  return z;
}

// One full Aberth-Ehrlich run (Gauss-Seidel sweeps).
template <typename Real>
bool aberth(const std::vector<cx<Real>>& c, std::vector<cx<Real>>& z,
            Real tol, int max_iter) {
  const int n = static_cast<int>(c.size()) - 1;
  std::vector<cx<Real>> crev(c.rbegin(), c.rend());
  for (int iter = 0; iter < max_iter; ++iter) {
    Real max_rel = 0;
    for (int i = 0; i < n; ++i) {
      const cx<Real> zi = z[i];
      cx<Real> nw;
      bool deriv_zero = false;
      if (newton_correction(c, crev, zi, nw, deriv_zero)) continue;
      if (deriv_zero) {
        // stationary point of p; nudge off it
        z[i] = zi * Real(1.0001) + cx<Real>(0, Real(1e-6));
        max_rel = std::max(max_rel, Real(1));
        continue;
      }
      cx<Real> s(0);
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        cx<Real> d = zi - z[j];
        if (d == cx<Real>(0)) {
          d = cx<Real>(std::numeric_limits<Real>::epsilon() *
                       (Real(1) + std::abs(zi)));
        }
        s += Real(1) / d;
      }
      const cx<Real> denom = Real(1) - nw * s;
      const cx<Real> delta = (denom == cx<Real>(0)) ? nw : nw / denom;
      z[i] = zi - delta;
      const Real rel = std::abs(delta) / std::max(Real(1), std::abs(z[i]));
      max_rel = std::max(max_rel, rel);
    }
    if (max_rel < tol) return true;
  }
  return false;
}

// |P(z)| / max(1,|z|)^n, overflow-safe via the reversed polynomial.
double scaled_abs_eval(const std::vector<cplx>& c, cplx z) {
  const int n = static_cast<int>(c.size()) - 1;
  if (std::abs(z) <= 1.0) {
    cplx p = c[n];
    for (int k = n - 1; k >= 0; --k) p = p * z + c[k];
    return std::abs(p);
  }
  const cplx w = 1.0 / z;
  cplx q = c[0];
  for (int k = 1; k <= n; ++k) q = q * w + c[k];
  return std::abs(q);
}

double reconstruction_error_of(const std::vector<cplx>& c,
                               const std::vector<cplx>& roots) {
  using cl = std::complex<long double>;
  std::vector<cl> prod{cl(c.back())};
  prod.reserve(c.size());
  for (const cplx& r : roots) {
    const cl rl(r);
    prod.push_back(cl(0));
    for (std::size_t k = prod.size() - 1; k > 0; --k) {
      prod[k] = prod[k - 1] - rl * prod[k];
    }
    prod[0] = -rl * prod[0];
  }
  long double num = 0, den = 0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    num += std::norm(prod[k] - cl(c[k]));
    den += std::norm(cl(c[k]));
  }
  return static_cast<double>(std::sqrt(num / den));
}

template <typename Real>
std::vector<cx<Real>> to_monic(const std::vector<cplx>& base) {
  const int m = static_cast<int>(base.size()) - 1;
  std::vector<cx<Real>> monic(m + 1);
  const cx<Real> lead(base[m]);
  for (int k = 0; k < m; ++k) monic[k] = cx<Real>(base[k]) / lead;
  monic[m] = cx<Real>(1);
  for (const auto& v : monic) {
    if (!std::isfinite(static_cast<double>(v.real())) ||
        !std::isfinite(static_cast<double>(v.imag()))) {
      throw convergence_error(
          "find_roots: leading coefficient too small relative to the others",
          {});
    }
  }
  return monic;
}

}  // namespace

Polynomial::Polynomial(std::vector<cplx> coeffs) : coeffs_(std::move(coeffs)) {
  while (!coeffs_.empty() && coeffs_.back() == cplx(0)) coeffs_.pop_back();
  if (coeffs_.empty()) {
    throw config_error("Polynomial: all coefficients are zero");
  }
}

double Polynomial::abs_coeff_sum() const {
  double s = 0;
  for (const cplx& c : coeffs_) s += std::abs(c);
  return s;
}

cplx evaluate(const Polynomial& p, cplx z) {
  const auto& c = p.coeffs();
  cplx v = c.back();
  for (int k = p.degree() - 1; k >= 0; --k) v = v * z + c[k];
  return v;
}

SupNormInterval sup_norm_circle(const Polynomial& p, int grid_factor) {
  if (grid_factor < 8) {
    throw config_error("sup_norm_circle: grid_factor must be >= 8");
  }
  const int n = p.degree();
  const long N = static_cast<long>(grid_factor) * std::max(n, 1);
  double lo = 0;
  for (long j = 0; j < N; ++j) {
    const double theta = kTwoPi * static_cast<double>(j) / static_cast<double>(N);
    lo = std::max(lo, std::abs(evaluate(p, std::polar(1.0, theta))));
  }
  const double sum_abs = p.abs_coeff_sum();
  double hi = lo / std::cos(static_cast<double>(n) * kPi / (2.0 * N));
  hi = std::min(hi, sum_abs);
  hi = std::max(hi, lo);
  return {lo, hi};
}

RootSet find_roots(const Polynomial& p, double tol, int max_iter) {
  const int n = p.degree();
  if (n < 1) throw config_error("find_roots: degree must be >= 1");
  const auto& c = p.coeffs();

  // exact zero roots come off by deflation
  int k0 = 0;
  while (c[k0] == cplx(0)) ++k0;
  const std::vector<cplx> base(c.begin() + k0, c.end());
  const int m = n - k0;

  std::vector<cplx> roots(k0, cplx(0));
  std::vector<cplx> best_partial;
  if (m > 0) {
    bool solved = false;
    for (int attempt = 0; attempt < 2 && !solved; ++attempt) {
      const double offset = attempt == 0 ? 0.7 : 2.1;
      std::vector<cplx> found;
      bool converged = false;
      if (attempt == 0) {
        auto monic = to_monic<double>(base);
        auto z = initial_guesses(monic, offset);
        converged = aberth(monic, z, tol, max_iter);
        found = std::move(z);
      } else {
        auto monic = to_monic<long double>(base);
        auto z = initial_guesses(monic, offset);
        converged =
            aberth(monic, z, static_cast<long double>(tol), max_iter);
        found.reserve(z.size());
        for (const auto& v : z) {
          found.emplace_back(static_cast<double>(v.real()),
                             static_cast<double>(v.imag()));
        }
      }
      if (converged) {
        std::vector<cplx> candidate = roots;
        candidate.insert(candidate.end(), found.begin(), found.end());
        if (reconstruction_error_of(c, candidate) <= 1e-8) {
          roots = std::move(candidate);
          solved = true;
          break;
        }
      }
      best_partial = roots;
      best_partial.insert(best_partial.end(), found.begin(), found.end());
    }
    if (!solved) {
      throw convergence_error("find_roots: iteration did not converge",
                              std::move(best_partial));
    }
  }

  RootSet rs;
  rs.roots = std::move(roots);
  const double sum_abs = p.abs_coeff_sum();
  rs.residuals.reserve(rs.roots.size());
  for (const cplx& z : rs.roots) {
    rs.residuals.push_back(scaled_abs_eval(c, z) / sum_abs);
  }
  rs.reconstruction_error = reconstruction_error_of(c, rs.roots);
  return rs;
}

double mahler_measure(const Polynomial& p, const RootSet& roots) {
  if (static_cast<int>(roots.roots.size()) != p.degree()) {
    throw config_error("mahler_measure: root count does not match degree");
  }
  double m = std::log(std::abs(p.leading()));
  for (const cplx& z : roots.roots) {
    const double a = std::abs(z);
    if (a > 1.0) m += std::log(a);
  }
  return m;
}

NormalizedPolynomial normalize_by_endpoints(const Polynomial& p) {
  const double a0 = std::abs(p.constant());
  const double an = std::abs(p.leading());
  if (a0 < kUnderflowZero || an < kUnderflowZero) {
    throw degenerate_draw("normalize_by_endpoints: zero endpoint coefficient");
  }
  const double log_scale = 0.5 * (std::log(a0) + std::log(an));
  const double s = std::exp(-log_scale);
  std::vector<cplx> scaled = p.coeffs();
  for (cplx& v : scaled) v *= s;
  return {Polynomial(std::move(scaled)), log_scale};
}

std::string polynomial_to_csv_row(const Polynomial& p) {
  std::string out;
  char buf[64];
  for (const cplx& c : p.coeffs()) {
    if (!out.empty()) out.push_back(',');
    std::snprintf(buf, sizeof buf, "%.17g", c.real());
    out += buf;
    out.push_back(',');
    std::snprintf(buf, sizeof buf, "%.17g", c.imag());
    out += buf;
  }
  return out;
}

Polynomial polynomial_from_csv_row(const std::string& line) {
  std::vector<double> parts;
  const char* s = line.c_str();
  while (*s) {
    char* end = nullptr;
    const double v = std::strtod(s, &end);
    if (end == s) {
      throw io_error("polynomial_from_csv_row: malformed number in '" + line +
                     "'");
    }
    parts.push_back(v);
    s = end;
    while (*s == ',' || *s == ' ' || *s == '\t') ++s;
  }
  if (parts.empty() || parts.size() % 2 != 0) {
    throw io_error("polynomial_from_csv_row: expected interleaved re,im pairs");
  }
  std::vector<cplx> coeffs;
  coeffs.reserve(parts.size() / 2);
  for (std::size_t i = 0; i < parts.size(); i += 2) {
    coeffs.emplace_back(parts[i], parts[i + 1]);
  }
  return Polynomial(std::move(coeffs));
}

}  // namespace rpz
