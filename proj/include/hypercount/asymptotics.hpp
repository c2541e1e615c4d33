#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace hypercount {

using Vec4 = std::array<double, 4>;
using Mat4 = std::array<Vec4, 4>;

// Central difference with one Richardson step.
double richardson_derivative(const std::function<double(double)>& f, double x, double h);

// ---- cores ----------------------------------------------------------------

// Scaled core exponent at nu1 = nu1hat * n; n and m are the real scales.
double fcore(double n, double m, double nu1hat);
// 3 mhat / g_2(lambda) with lambda from the core equation at 3m/n.
double core_nu1_star(double n, double m);

// ln(n sqrt m) + ln n! + n fcore(nu1*), i.e. the core bound with its constant set to 1.
double gcore_upper_bound(long n, long m);

// ---- pre-kernels ----------------------------------------------------------

struct PreHat {
  double nu1 = 0, k0 = 0, k1 = 0, k2 = 0;
  Vec4 vec() const { return {nu1, k0, k1, k2}; }
  static PreHat from(const Vec4& v) { return {v[0], v[1], v[2], v[3]}; }
};

struct PreHatDerived {
  double n2eq, n3, m2, m2p, P2, m3, P3, Q3, T3, T2;
};
PreHatDerived pre_hat_derived(double n, double m, const PreHat& x);

// Throws RegionError naming the first violated condition; slack 1e-12.
void check_region_hat(double n, double m, const PreHat& x);
// Strictly inside the region (every derived count positive and Q3 > 3 n3).
bool in_region_interior(double n, double m, const PreHat& x);

// lambda(x) with lambda f_2/f_3 = Q3/n3; 0 on the boundary Q3 = 3 n3.
double pre_lambda(double n, double m, const PreHat& x);
double fpre(double n, double m, const PreHat& x);
// Closed-form partial derivatives of fpre (interior points only).
Vec4 fpre_gradient(double n, double m, const PreHat& x);
// Richardson central differences of fpre.
Vec4 fpre_gradient_numeric(double n, double m, const PreHat& x, double rel_step = 1e-3);
// Central differences of the closed-form gradient, symmetrised.
Mat4 fpre_hessian_numeric(double n, double m, const PreHat& x, double step);

struct OptimumPoint {
  double n = 0, m = 0, r = 0;
  double lambda = 0;  // lambda-hat
  PreHat x;
  double nu1_star = 0;  // core optimum, 3 mhat / g_2(lambda)
  double value = 0;     // fpre(x)
};
OptimumPoint optimum(double n, double m);

struct SeriesRow {
  std::string name;
  double value = 0, series = 0, residual = 0, margin = 0;
  bool pass = false;
};
// Pre-kernel parameters at x* against their second-order expansion in lambda,
// margin lambda^3.
std::vector<SeriesRow> pre_series_check(const OptimumPoint& opt);
// lambda, nu1*, Q2, n2, m3 against their first-order expansion in r.
std::vector<SeriesRow> core_series_check(double n, double m);
// 2r ln n - 4r ln r + c1 lambda + c2 lambda^2.
double fpre_optimum_series(double n, double r, double lambda);

struct MaximizeResult {
  PreHat start, x;
  double value = 0;
  double grad_norm = 0;
  double max_coord_error = 0;  // against optimum().x
  int iterations = 0;
};
// Newton ascent with backtracking kept in the interior; falls back to the
// gradient when the Hessian is not negative definite.
std::vector<MaximizeResult> maximize_fpre(double n, double m, int starts, std::uint64_t seed);

// ---- Hessian structure at the optimum -------------------------------------

struct HessianModel {
  // H0 = h0 / 36 and T = t / 90, integer numerators.
  std::array<std::array<long, 4>, 4> h0, t;
  std::array<long, 4> z1;
  Mat4 H0() const;
  Mat4 T() const;
  std::array<long, 4> H0_times_z1() const;  // exact, in units of 1/36
};
const HessianModel& hessian_model();

struct HessianCheck {
  double r = 0, rho = 0, lambda = 0;
  Mat4 numeric;
  double err_rho = 0;        // ||(-rho^2) H - H0 - rho T||_inf with rho = lambda/12
  double err_r = 0;          // same with r in place of rho
  double lead_err_r = 0;     // ||(-r^2) H - H0||_inf
  double lead_err_rho = 0;
};
HessianCheck hessian_check(double n, double m);

// ---- whole graph ----------------------------------------------------------

struct TValue {
  double by_definition = 0;
  double expanded = 0;
};
// t at nuhat for N vertices and excess R (m = nuhat N / 2 + R on nuhat N vertices).
TValue t_of_nu(double nuhat, double N, double R);

struct MainEstimate {
  double lambda = 0;    // lambda**
  double nu_star = 0;
  double phi = 0;
  double log_phi_form = 0;
  double log_t_form = 0;
};
MainEstimate main_count_estimate(double N, double M);

struct BckEstimate {
  double zeta = 0, r = 0;
  double prefactor = 0, exponent = 0, log_phi = 0;
  double log_binom = 0;
  double log_value = 0;
};
BckEstimate bck_count_estimate(double N, double M, int k = 3);
// Pieces of the connectivity probability, evaluated in extended precision.
double bck_prefactor(int k, double zeta, double r);
double bck_exponent(int k, double zeta, double r);
// zeta on the fixed-point curve through r, and both pieces evaluated there
// without rounding zeta first.
double bck_zeta_from_r(int k, double r);
std::pair<double, double> bck_limits_at(int k, double r);
// ln binom(A, M) for huge A, stable when M << A.
double log_binom_large(double A, double M);

// ---- numerical lemmas -----------------------------------------------------

// (1/s) sum over x in (z + Z)/s, |x| <= T, of exp(-a x^2 + b x + phi x^2 + psi x).
double laplace_lattice_sum(double alpha, double beta, double phi, double psi, double z, double s,
                           double T);

// max over the grid of |d/dy [t ln f_k(lambda) - T ln lambda] - (t' ln f_k(lambda) - T' ln lambda)|,
// lambda = lambda(y) the truncated-Poisson parameter for mean T/t.
double difdeg_identity_check(int k, const std::function<double(double)>& t_fn,
                             const std::function<double(double)>& T_fn,
                             const std::vector<double>& y_grid);

// Default diagnostic windows: delta1 = (r/n)^0.4, delta = (r^4/n)^0.4.
struct WindowDefaults {
  double delta1, delta;
};
WindowDefaults window_defaults(double n, double r);

// ln of sqrt(3)/(pi n) n! exp(n fpre(x*)).
double gpre_asymptotic_log(long n, long m);

}  // namespace hypercount
