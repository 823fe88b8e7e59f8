#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rpz {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Coefficients with modulus below this are treated as exact zeros when an
// operation needs a nonzero endpoint.
inline constexpr double kUnderflowZero = 1e-300;

// Malformed specs, configs, CLI input.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A requested quantity is infinite under the given ensemble (infinite
// absolute moment, log-moment of a modulus with an atom at zero).
class hypothesis_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Toeplitz moment system too close to singular to orthonormalize.
class conditioning_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A draw produced a zero endpoint coefficient; callers redraw.
class degenerate_draw : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Root iteration failed after escalation; carries the last iterate state.
class convergence_error : public std::runtime_error {
 public:
  convergence_error(const std::string& what, std::vector<cplx> partial)
      : std::runtime_error(what), partial_roots(std::move(partial)) {}
  std::vector<cplx> partial_roots;
};

class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rpz
