#include "hypercount/special_fn.hpp"

#include <cmath>

#include "hypercount/errors.hpp"

namespace hypercount {

double f_k(int k, double lambda) {
  if (!(lambda >= 0.0)) throw DomainError("f_k: lambda must be nonnegative");
  if (k <= 0) return std::exp(lambda);
  if (lambda == 0.0) return 0.0;
  if (lambda < k) {
    // Tail series; the direct difference would cancel here.
    double term = 1.0;
    for (int i = 1; i <= k; ++i) term *= lambda / i;
    double sum = term;
    for (int i = k + 1; term > 1e-18 * sum; ++i) {
      term *= lambda / i;
      sum += term;
    }
    return sum;
  }
  double partial = 0.0, term = 1.0;
  for (int i = 0; i < k; ++i) {
    partial += term;
    term *= lambda / (i + 1);
  }
  return std::exp(lambda) - partial;
}

double g_k(int k, double lambda) { return std::exp(lambda) + k; }

double h_entropy(double x, double n) {
  if (x < 0.0) throw DomainError("h_entropy: x must be nonnegative");
  if (x == 0.0) return 0.0;
  return x * std::log(x * n) - x;
}

}  // namespace hypercount
