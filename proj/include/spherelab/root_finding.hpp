// Bracketed scalar root finding: bisection with inverse-quadratic /
// secant acceleration (Brent).
#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

namespace spherelab {

struct RootBracket {
  double lo = 0.0;
  double hi = 1.0;
  double tol = 1e-12;  // absolute tolerance on the abscissa
};

// Root of f in [bracket.lo, bracket.hi]; f must change sign on the bracket.
template <class F>
double brent_root(F&& f, RootBracket bracket, int max_iter = 200) {
  double a = bracket.lo, b = bracket.hi;
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0))
    throw std::invalid_argument("brent_root: bracket endpoints have the same sign");

  if (std::abs(fa) < std::abs(fb)) {
    std::swap(a, b);
    std::swap(fa, fb);
  }
  double c = a, fc = fa;
  double d = b - a;
  bool bisected = true;

  for (int iter = 0; iter < max_iter; ++iter) {
    if (fb == 0.0 || std::abs(b - a) <= bracket.tol) return b;

    double s;
    if (fa != fc && fb != fc) {
      // inverse quadratic interpolation
      s = a * fb * fc / ((fa - fb) * (fa - fc)) +
          b * fa * fc / ((fb - fa) * (fb - fc)) +
          c * fa * fb / ((fc - fa) * (fc - fb));
    } else {
      s = b - fb * (b - a) / (fb - fa);  // secant
    }

    const double mid = 0.25 * (3.0 * a + b);
    const bool out_of_range = !(s > std::fmin(mid, b)) || !(s < std::fmax(mid, b));
    const bool slow = bisected ? std::abs(s - b) >= 0.5 * std::abs(b - c)
                               : std::abs(s - b) >= 0.5 * std::abs(c - d);
    const bool stale = bisected ? std::abs(b - c) < bracket.tol
                                : std::abs(c - d) < bracket.tol;
    if (!std::isfinite(s) || out_of_range || slow || stale) {
      s = 0.5 * (a + b);
      bisected = true;
    } else {
      bisected = false;
    }

    const double fs = f(s);
    d = c;
    c = b;
    fc = fb;
    if ((fa > 0.0) != (fs > 0.0)) {
      b = s;
      fb = fs;
    } else {
      a = s;
      fa = fs;
    }
    if (std::abs(fa) < std::abs(fb)) {
      std::swap(a, b);
      std::swap(fa, fb);
    }
  }
  return b;
}

}  // namespace spherelab
