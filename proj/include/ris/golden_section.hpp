#ifndef RIS_GOLDEN_SECTION_HPP
#define RIS_GOLDEN_SECTION_HPP

#include <cmath>
#include <utility>

#include "ris/common.hpp"

namespace ris {

template <typename Scalar>
struct GoldenSectionResult {
  Scalar x;
  Scalar value;
  int iterations;
};

/// Minimizes a unimodal function on [lower, upper] until the bracket is
/// narrower than `tolerance`. Throws ConvergenceError on a non-finite
/// objective value or when `max_iterations` is exhausted.
template <typename Scalar, typename Function>
GoldenSectionResult<Scalar> golden_section_minimize(Function&& f, Scalar lower, Scalar upper, Scalar tolerance,
                                                    int max_iterations = 200) {
  const Scalar inv_phi = (std::sqrt(Scalar(5)) - Scalar(1)) / Scalar(2);
  auto eval = [&](Scalar x) {
    const Scalar v = f(x);
    if (!std::isfinite(v)) throw ConvergenceError("golden_section_minimize: non-finite objective");
    return v;
  };

  Scalar a = lower, b = upper;
  Scalar c = b - inv_phi * (b - a);
  Scalar d = a + inv_phi * (b - a);
  Scalar fc = eval(c), fd = eval(d);
  int it = 0;
  while (b - a > tolerance) {
    if (++it > max_iterations) {
      throw ConvergenceError("golden_section_minimize: no convergence after " + std::to_string(max_iterations) +
                             " iterations");
    }
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = eval(d);
    }
  }
  const Scalar x = (a + b) / Scalar(2);
  return {x, eval(x), it};
}

}  // namespace ris

#endif  // RIS_GOLDEN_SECTION_HPP
