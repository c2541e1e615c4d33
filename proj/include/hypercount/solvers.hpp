#pragma once

#include <string>

namespace hypercount {

enum class Equation { TpoMean, Core, Global, Bck };

std::string equation_name(Equation eq, int k = 0);

struct LambdaSolution {
  double lambda = 0.0;
  double residual = 0.0;  // F(lambda) - target
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  Equation equation = Equation::TpoMean;
  int k = 0;
};

// Left-hand sides of the fixed-point equations, all increasing in lambda.
double tpo_mean_value(int k, double lambda);
double core_equation_value(double lambda);
double global_equation_value(double lambda);
// (2 lambda f_1 g_2 - 3 f_2(2 lambda)) / (f_1 g_1); equals 2 * global - 3.
double global_equation_alt_value(double lambda);

// lambda with lambda f_{k-1}/f_k = c, c > k.
LambdaSolution solve_tpo_mean(int k, double c);
// lambda with lambda f_1 g_2 / f_2(2 lambda) = 3m/n, argument > 3/2.
LambdaSolution solve_core_lambda(double three_m_over_n);
// lambda** for the whole graph: lambda (e^{2l} + e^l + 1) / (f_1 g_1) = 3M/N.
LambdaSolution solve_global_lambda(long long M, long long N);
LambdaSolution solve_global_lambda_ratio(double three_M_over_N);

struct BckSolution {
  double r = 1.0;
  double residual = 0.0;  // r - exp(-zeta (1-r)(1-r^{k-1})/(1-r^k))
  int iterations = 0;
  bool used_bisection = false;
};

double bck_map(int k, double zeta, double r);

// Nontrivial root r in (0,1) of the connectivity fixed point; zeta > k/(k-1).
BckSolution solve_bck_r(int k, double zeta);

}  // namespace hypercount
