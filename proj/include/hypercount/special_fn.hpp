#pragma once

namespace hypercount {

// e^lambda minus the first k Taylor terms. k <= 0 gives e^lambda.
double f_k(int k, double lambda);

// e^lambda + k
double g_k(int k, double lambda);

// x ln(x n) - x, with h(0, n) = 0.
double h_entropy(double x, double n);

}  // namespace hypercount
