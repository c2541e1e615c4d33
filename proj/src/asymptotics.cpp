#include "hypercount/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "hypercount/errors.hpp"
#include "hypercount/rng.hpp"
#include "hypercount/solvers.hpp"
#include "hypercount/special_fn.hpp"

namespace hypercount {

namespace {

constexpr double kSlack = 1e-12;
const double kLn2 = std::log(2.0);
const double kLn3 = std::log(3.0);
const double kLn6 = std::log(6.0);

double hpos(double x, double n) { return h_entropy(std::max(x, 0.0), n); }

}  // namespace

double richardson_derivative(const std::function<double(double)>& f, double x, double h) {
  auto central = [&](double s) { return (f(x + s) - f(x - s)) / (2 * s); };
  return (4 * central(h / 2) - central(h)) / 3;
}

double core_nu1_star(double n, double m) {
  double lam = solve_core_lambda(3 * m / n).lambda;
  return 3 * (m / n) / g_k(2, lam);
}

double fcore(double n, double m, double nu1hat) {
  double lo = std::max(0.0, 2 * n - 3 * m), hi = std::min(n, m);
  double nu1 = nu1hat * n;
  if (nu1 < lo - kSlack * n || nu1 > hi + kSlack * n)
    throw DomainError("fcore: nu1 outside J_m = [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  double mh = m / n;
  double n2 = 1 - nu1hat, m3 = mh - nu1hat, Q2 = 3 * mh - nu1hat;
  double v = hpos(Q2, n) - hpos(n2, n) - hpos(nu1hat, n) - hpos(m3, n) - nu1hat * kLn2 - m3 * kLn6;
  if (n2 <= kSlack) return Q2 <= kSlack ? v : -std::numeric_limits<double>::infinity();
  bool boundary = std::abs(nu1 - (2 * n - 3 * m)) <= kSlack * n || Q2 / n2 <= 2 + 1e-12;
  if (boundary) return v - n2 * kLn2;
  double lam = solve_tpo_mean(2, Q2 / n2).lambda;
  if (lam == 0.0) return v - n2 * kLn2;
  return v + n2 * std::log(f_k(2, lam)) - Q2 * std::log(lam);
}

double gcore_upper_bound(long n, long m) {
  if (2 * m <= n) throw DomainError("gcore_upper_bound: need m > n/2");
  double nd = static_cast<double>(n), md = static_cast<double>(m);
  return std::log(nd * std::sqrt(md)) + std::lgamma(nd + 1) + nd * fcore(nd, md, core_nu1_star(nd, md));
}

PreHatDerived pre_hat_derived(double n, double m, const PreHat& x) {
  PreHatDerived d{};
  double mh = m / n;
  d.n2eq = x.k0 + x.k1 + x.k2;
  d.n3 = 1 - x.nu1 - d.n2eq;
  d.m2 = x.nu1;
  d.m2p = x.nu1 - x.k0;
  d.P2 = 2 * d.m2p;
  d.m3 = mh - x.nu1;
  d.P3 = 3 * d.m3;
  d.Q3 = 3 * mh - x.nu1 - 2 * d.n2eq;
  d.T3 = d.P3 - x.k1 - 2 * x.k2;
  d.T2 = d.P2 - x.k1;
  return d;
}

void check_region_hat(double n, double m, const PreHat& x) {
  PreHatDerived d = pre_hat_derived(n, m, x);
  auto in = [](double v) { return v >= -kSlack && v <= 1 + kSlack; };
  if (!in(x.nu1) || !in(x.k0) || !in(x.k1) || !in(x.k2) || d.m3 < -kSlack || d.m2p < -kSlack)
    throw RegionError("C1", "coordinates must lie in [0, 1] (scaled) with m3, m2' >= 0");
  if (d.T2 < -kSlack) throw RegionError("C2", "T2 < 0");
  if (d.T3 < -kSlack) throw RegionError("C3", "T3 < 0");
  if (d.n3 < -kSlack || d.Q3 < 3 * d.n3 - kSlack) throw RegionError("C4", "need Q3 >= 3 n3 >= 0");
  if (std::abs(d.n3) <= kSlack && std::abs(d.Q3) > kSlack) throw RegionError("C5", "Q3 > 0 with n3 = 0");
}

bool in_region_interior(double n, double m, const PreHat& x) {
  PreHatDerived d = pre_hat_derived(n, m, x);
  return x.nu1 > 0 && x.k0 > 0 && x.k1 > 0 && x.k2 > 0 && d.n3 > 0 && d.m3 > 0 && d.m2p > 0 &&
         d.T3 > 0 && d.T2 > 0 && d.Q3 > 3 * d.n3 * (1 + 1e-12);
}

double pre_lambda(double n, double m, const PreHat& x) {
  PreHatDerived d = pre_hat_derived(n, m, x);
  if (d.n3 <= kSlack) return 0.0;
  double c3 = d.Q3 / d.n3;
  if (c3 <= 3 + 1e-12) return 0.0;
  return solve_tpo_mean(3, c3).lambda;
}

double fpre(double n, double m, const PreHat& x) {
  check_region_hat(n, m, x);
  PreHatDerived d = pre_hat_derived(n, m, x);
  auto H = [n](double y) { return hpos(y, n); };
  double v = H(d.P3) + H(d.P2) + H(d.Q3) + H(d.m2) - H(x.k0) - H(x.k1) - H(x.k2) - H(d.n3) - H(d.m3) -
             H(d.T3) - H(d.T2) - 2 * H(d.m2p) - x.k2 * kLn2 - d.m2p * kLn2 - d.m3 * kLn6;
  if (d.n3 <= kSlack) return v;
  double lam = pre_lambda(n, m, x);
  if (lam == 0.0) return v - d.n3 * kLn6;
  return v + d.n3 * std::log(f_k(3, lam)) - d.Q3 * std::log(lam);
}

Vec4 fpre_gradient(double n, double m, const PreHat& x) {
  if (!in_region_interior(n, m, x)) throw DomainError("fpre_gradient: point not interior");
  PreHatDerived d = pre_hat_derived(n, m, x);
  double lam = pre_lambda(n, m, x);
  double f3 = f_k(3, lam);
  return {
      std::log(4 * std::pow(d.T3, 3) * d.n3 * x.nu1 * lam /
               (9 * d.m3 * d.m3 * d.Q3 * d.T2 * d.T2 * f3)),
      std::log(d.n3 * d.T2 * d.T2 * lam * lam / (2 * d.Q3 * d.Q3 * x.k0 * f3)),
      std::log(d.T3 * d.n3 * d.T2 * lam * lam / (x.k1 * d.Q3 * d.Q3 * f3)),
      std::log(d.T3 * d.T3 * d.n3 * lam * lam / (2 * x.k2 * d.Q3 * d.Q3 * f3)),
  };
}

namespace {

// Smallest positive scale among the coordinates and derived counts, a safe
// finite-difference unit.
double local_scale(double n, double m, const PreHat& x) {
  PreHatDerived d = pre_hat_derived(n, m, x);
  double s = 1.0;
  for (double v : {x.nu1, x.k0, x.k1, x.k2, d.n3, d.m3, d.m2p, d.T3, d.T2, d.Q3 - 3 * d.n3})
    if (v > 0) s = std::min(s, v);
  return s;
}

}  // namespace

Vec4 fpre_gradient_numeric(double n, double m, const PreHat& x, double rel_step) {
  double h = rel_step * local_scale(n, m, x);
  Vec4 g{};
  Vec4 base = x.vec();
  for (int i = 0; i < 4; ++i) {
    g[i] = richardson_derivative(
        [&](double t) {
          Vec4 y = base;
          y[i] = t;
          return fpre(n, m, PreHat::from(y));
        },
        base[i], h);
  }
  return g;
}

Mat4 fpre_hessian_numeric(double n, double m, const PreHat& x, double step) {
  Mat4 H{};
  Vec4 base = x.vec();
  auto grad_at = [&](int j, double t) {
    Vec4 y = base;
    y[j] += t;
    return fpre_gradient(n, m, PreHat::from(y));
  };
  for (int j = 0; j < 4; ++j) {
    Vec4 a = grad_at(j, step), b = grad_at(j, -step);
    Vec4 c = grad_at(j, step / 2), e = grad_at(j, -step / 2);
    for (int i = 0; i < 4; ++i) {
      double d1 = (a[i] - b[i]) / (2 * step), d2 = (c[i] - e[i]) / step;
      H[i][j] = (4 * d2 - d1) / 3;
    }
  }
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) H[i][j] = H[j][i] = (H[i][j] + H[j][i]) / 2;
  return H;
}

OptimumPoint optimum(double n, double m) {
  if (2 * m <= n) throw DomainError("optimum: need m > n/2");
  OptimumPoint o;
  o.n = n;
  o.m = m;
  double mh = m / n;
  o.r = mh - 0.5;
  o.lambda = solve_core_lambda(3 * mh).lambda;
  double lam = o.lambda, f1 = f_k(1, lam), g1 = g_k(1, lam);
  double a = 3 * mh / g_k(2, lam);
  o.nu1_star = a;
  o.x = {a, a * 2 * lam / (f1 * g1), a * 2 * lam / g1, a * lam * f1 / (2 * g1)};
  o.value = fpre(n, m, o.x);
  return o;
}

std::vector<SeriesRow> pre_series_check(const OptimumPoint& opt) {
  PreHatDerived d = pre_hat_derived(opt.n, opt.m, opt.x);
  double L = opt.lambda, L2 = L * L;
  struct Item {
    const char* name;
    double value, series;
  };
  const Item items[] = {
      {"r", opt.r, L / 12 + L2 / 36},
      {"nu1", opt.x.nu1, 0.5 - L / 12 - L2 / 36},
      {"k0", opt.x.k0, 0.5 - 7 * L / 12 + 2 * L2 / 9},
      {"k1", opt.x.k1, L / 2 - L2 / 3},
      {"k2", opt.x.k2, L2 / 8},
      {"n3", d.n3, L / 6 + L2 / 72},
      {"Q3", d.Q3, L / 2 + L2 / 12},
      {"m3", d.m3, L / 6 + L2 / 18},
      {"m2p", d.m2p, L / 2 - L2 / 4},
      {"T2", d.T2, L / 2 - L2 / 6},
      {"T3", d.T3, L2 / 4},
  };
  std::vector<SeriesRow> rows;
  for (const auto& it : items) {
    SeriesRow row{it.name, it.value, it.series, it.value - it.series, L * L2, false};
    row.pass = std::abs(row.residual) <= row.margin;
    rows.push_back(row);
  }
  return rows;
}

std::vector<SeriesRow> core_series_check(double n, double m) {
  double r = m / n - 0.5;
  double lam = solve_core_lambda(3 * m / n).lambda;
  double nu1 = core_nu1_star(n, m);
  double mh = m / n;
  struct Item {
    const char* name;
    double value, series, margin;
  };
  // lambda carries a visible second-order term (about -48 r^2); the others do not.
  const Item items[] = {
      {"lambda", lam, 12 * r, 100 * r * r},
      {"nu1", nu1, 0.5 - r, 3 * r * r},
      {"Q2", 3 * mh - nu1, 1 + 4 * r, 3 * r * r},
      {"n2", 1 - nu1, 0.5 + r, 3 * r * r},
      {"m3", mh - nu1, 2 * r, 3 * r * r},
  };
  std::vector<SeriesRow> rows;
  for (const auto& it : items) {
    SeriesRow row{it.name, it.value, it.series, it.value - it.series, it.margin, false};
    row.pass = std::abs(row.residual) <= row.margin;
    rows.push_back(row);
  }
  return rows;
}

double fpre_optimum_series(double n, double r, double lambda) {
  double c1 = -2.0 / 3 * kLn2 - kLn3 / 3 + 1.0 / 3;
  double c2 = -2.0 / 9 * kLn2 - kLn3 / 9 + 7.0 / 36;
  return 2 * r * std::log(n) - 4 * r * std::log(r) + c1 * lambda + c2 * lambda * lambda;
}

std::vector<MaximizeResult> maximize_fpre(double n, double m, int starts, std::uint64_t seed) {
  OptimumPoint opt = optimum(n, m);
  Rng rng(seed, 0x6d6178);
  std::vector<MaximizeResult> out;
  auto norm = [](const Vec4& g) {
    double s = 0;
    for (double v : g) s += v * v;
    return std::sqrt(s);
  };
  for (int s = 0; s < starts; ++s) {
    Vec4 x0;
    for (int tries = 0;; ++tries) {
      if (tries > 10000) throw DomainError("maximize_fpre: no interior start found");
      Vec4 base = opt.x.vec();
      for (int i = 0; i < 4; ++i) x0[i] = base[i] * (0.7 + 0.6 * rng.uniform());
      if (in_region_interior(n, m, PreHat::from(x0))) break;
    }
    MaximizeResult res;
    res.start = PreHat::from(x0);
    Vec4 x = x0;
    double fx = fpre(n, m, PreHat::from(x));
    Vec4 g = fpre_gradient(n, m, PreHat::from(x));
    int it = 0;
    for (; it < 500 && norm(g) > 1e-11; ++it) {
      PreHat px = PreHat::from(x);
      double scale = local_scale(n, m, px);
      Mat4 Hm = fpre_hessian_numeric(n, m, px, 1e-4 * scale);
      Eigen::Matrix4d H;
      Eigen::Vector4d gv;
      for (int i = 0; i < 4; ++i) {
        gv(i) = g[i];
        for (int j = 0; j < 4; ++j) H(i, j) = Hm[i][j];
      }
      Eigen::LLT<Eigen::Matrix4d> llt(-H);
      Eigen::Vector4d dir;
      if (llt.info() == Eigen::Success)
        dir = llt.solve(gv);
      else
        dir = gv.normalized() * 0.1 * scale;
      bool moved = false;
      for (double t = 1.0; t > 1e-12; t /= 2) {
        Vec4 y;
        for (int i = 0; i < 4; ++i) y[i] = x[i] + t * dir(i);
        PreHat py = PreHat::from(y);
        if (!in_region_interior(n, m, py)) continue;
        double fy = fpre(n, m, py);
        Vec4 gy = fpre_gradient(n, m, py);
        if (fy > fx || norm(gy) < norm(g)) {
          x = y;
          fx = fy;
          g = gy;
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
    res.x = PreHat::from(x);
    res.value = fx;
    res.grad_norm = norm(g);
    res.iterations = it;
    Vec4 xs = opt.x.vec();
    for (int i = 0; i < 4; ++i) res.max_coord_error = std::max(res.max_coord_error, std::abs(x[i] - xs[i]));
    out.push_back(res);
  }
  return out;
}

const HessianModel& hessian_model() {
  static const HessianModel model{
      {{{33, 12, 15, 18}, {12, 6, 6, 6}, {15, 6, 7, 8}, {18, 6, 8, 12}}},
      {{{-141, -48, -33, -18}, {-48, 66, 36, 6}, {-33, 36, 31, -4}, {-18, 6, -4, -4}}},
      {1, 1, -3, 0},
  };
  return model;
}

Mat4 HessianModel::H0() const {
  Mat4 out{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out[i][j] = h0[i][j] / 36.0;
  return out;
}

Mat4 HessianModel::T() const {
  Mat4 out{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out[i][j] = t[i][j] / 90.0;
  return out;
}

std::array<long, 4> HessianModel::H0_times_z1() const {
  std::array<long, 4> out{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out[i] += h0[i][j] * z1[j];
  return out;
}

HessianCheck hessian_check(double n, double m) {
  OptimumPoint opt = optimum(n, m);
  HessianCheck c;
  c.r = opt.r;
  c.lambda = opt.lambda;
  c.rho = opt.lambda / 12;
  c.numeric = fpre_hessian_numeric(n, m, opt.x, 1e-4 * local_scale(n, m, opt.x));
  Mat4 H0 = hessian_model().H0(), T = hessian_model().T();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double h = c.numeric[i][j];
      c.err_rho = std::max(c.err_rho, std::abs(-c.rho * c.rho * h - H0[i][j] - c.rho * T[i][j]));
      c.err_r = std::max(c.err_r, std::abs(-c.r * c.r * h - H0[i][j] - c.r * T[i][j]));
      c.lead_err_r = std::max(c.lead_err_r, std::abs(-c.r * c.r * h - H0[i][j]));
      c.lead_err_rho = std::max(c.lead_err_rho, std::abs(-c.rho * c.rho * h - H0[i][j]));
    }
  return c;
}

TValue t_of_nu(double nuhat, double N, double R) {
  if (!(nuhat > 0 && nuhat < 1)) throw DomainError("t_of_nu: need 0 < nuhat < 1");
  double n = nuhat * N, m = n / 2 + R;
  if (!(R > 0)) throw DomainError("t_of_nu: need R > 0");
  double lam = solve_core_lambda(3 * m / n).lambda;
  double lead = -(1 - nuhat) / 2 * std::log1p(-nuhat) + (1 - nuhat) / 2;
  TValue t;
  t.by_definition = lead + nuhat * fcore(n, m, 3 * (m / n) / g_k(2, lam));
  double RN = R / N, mh = m / n;
  double f1 = f_k(1, lam), g1 = g_k(1, lam), g2 = g_k(2, lam), F2 = f_k(2, 2 * lam);
  t.expanded = lead + 2 * RN * std::log(N) + (2 * kLn3 - kLn2 - 2) * RN + 2 * RN * std::log(nuhat) +
               (kLn3 - kLn2 / 2) * nuhat + std::log(F2 / g1) * nuhat +
               (nuhat / 2 + RN) * std::log(mh * mh * std::pow(g1, 3) / (g2 * g2 * f1 * std::pow(lam, 3)));
  return t;
}

MainEstimate main_count_estimate(double N, double M) {
  if (2 * M <= N) throw DomainError("main_count_estimate: need M > N/2");
  MainEstimate e;
  e.lambda = solve_global_lambda_ratio(3 * M / N).lambda;
  double lam = e.lambda, f1 = f_k(1, lam), g1 = g_k(1, lam);
  double x = f_k(2, 2 * lam) / (f1 * g1);
  e.nu_star = x;
  double R = M - N / 2, RN = R / N;
  e.phi = -(1 - x) / 2 * std::log1p(-x) + (1 - x) / 2 + 2 * RN * std::log(N) - (kLn2 + 2) * RN -
          kLn2 / 2 * x + RN * std::log(g1 / (lam * f1)) + x / 2 * std::log(f1 * g1 / lam);
  double pre = 0.5 * std::log(3 / (std::numbers::pi * N)) + N * std::log(N) - N;
  e.log_phi_form = pre + N * e.phi;
  e.log_t_form = pre + N * t_of_nu(x, N, R).by_definition;
  return e;
}

namespace {

using Ext = boost::multiprecision::cpp_bin_float_50;

Ext ipow(const Ext& b, int e) { return boost::multiprecision::pow(b, e); }

Ext prefactor_ext(int k, const Ext& z, const Ext& r) {
  Ext rk = ipow(r, k), rk1 = ipow(r, k - 1);
  Ext num = 1 - rk - (1 - r) * z * (k - 1) * rk1;
  Ext den = (1 - rk + z * (k - 1) * (r - rk1)) * (1 - rk) - z * k * r * (1 - rk1) * (1 - rk1);
  return num / boost::multiprecision::sqrt(den);
}

Ext exponent_ext(int k, const Ext& z, const Ext& r) {
  Ext rk = ipow(r, k), rk1 = ipow(r, k - 1);
  return z * (k - 1) * (r - 2 * rk + rk1) / (2 * (1 - rk));
}

Ext zeta_ext(int k, const Ext& r) {
  return -boost::multiprecision::log(r) * (1 - ipow(r, k)) / ((1 - r) * (1 - ipow(r, k - 1)));
}

}  // namespace

double bck_prefactor(int k, double zeta, double r) {
  return static_cast<double>(prefactor_ext(k, Ext(zeta), Ext(r)));
}

double bck_exponent(int k, double zeta, double r) {
  return static_cast<double>(exponent_ext(k, Ext(zeta), Ext(r)));
}

double bck_zeta_from_r(int k, double r) { return static_cast<double>(zeta_ext(k, Ext(r))); }

std::pair<double, double> bck_limits_at(int k, double r) {
  Ext rr(r), z = zeta_ext(k, rr);
  return {static_cast<double>(prefactor_ext(k, z, rr)), static_cast<double>(exponent_ext(k, z, rr))};
}

double log_binom_large(double A, double M) {
  if (M < 0 || M > A) throw DomainError("log_binom_large: need 0 <= M <= A");
  if (M > 1e8 || M > A / 2) return std::lgamma(A + 1) - std::lgamma(M + 1) - std::lgamma(A - M + 1);
  double s = M * std::log(A) - std::lgamma(M + 1);
  for (double i = 1; i < M; ++i) s += std::log1p(-i / A);
  return s;
}

BckEstimate bck_count_estimate(double N, double M, int k) {
  if (k < 2) throw DomainError("bck_count_estimate: k must be at least 2");
  BckEstimate e;
  e.zeta = k * M / N;
  if (!(e.zeta > static_cast<double>(k) / (k - 1)))
    throw DomainError("bck_count_estimate: need zeta = kM/N > k/(k-1)");
  e.r = solve_bck_r(k, e.zeta).r;
  double r = e.r, z = e.zeta;
  e.prefactor = bck_prefactor(k, z, r);
  e.exponent = bck_exponent(k, z, r);
  double l = -std::log(r);
  e.log_phi = -(r / (1 - r)) * l + (1 - z) * std::log1p(-r) + (z / k) * std::log(-std::expm1(-k * l));
  double A = std::exp(std::lgamma(N + 1) - std::lgamma(k + 1.0) - std::lgamma(N - k + 1));
  if (N < 1e5) {
    A = 1;
    for (int i = 0; i < k; ++i) A *= (N - i) / (i + 1);
  }
  e.log_binom = log_binom_large(A, M);
  e.log_value = e.log_binom + std::log(e.prefactor) + e.exponent + N * e.log_phi;
  return e;
}

double laplace_lattice_sum(double alpha, double beta, double phi, double psi, double z, double s,
                           double T) {
  if (!(alpha > 0)) throw DomainError("laplace_lattice_sum: alpha must be positive");
  if (!(s >= 1)) throw DomainError("laplace_lattice_sum: s must be at least 1");
  long lo = static_cast<long>(std::ceil(-T * s - z)), hi = static_cast<long>(std::floor(T * s - z));
  double sum = 0;
  for (long j = lo; j <= hi; ++j) {
    double x = (z + j) / s;
    sum += std::exp(-alpha * x * x + beta * x + phi * x * x + psi * x);
  }
  return sum / s;
}

double difdeg_identity_check(int k, const std::function<double(double)>& t_fn,
                             const std::function<double(double)>& T_fn,
                             const std::vector<double>& y_grid) {
  auto lam_at = [&](double y) { return solve_tpo_mean(k, T_fn(y) / t_fn(y)).lambda; };
  auto F = [&](double y) {
    double lam = lam_at(y);
    return t_fn(y) * std::log(f_k(k, lam)) - T_fn(y) * std::log(lam);
  };
  const double h = 1e-5;
  double worst = 0;
  for (double y : y_grid) {
    double lhs = richardson_derivative(F, y, h);
    double lam = lam_at(y);
    double rhs = richardson_derivative(t_fn, y, h) * std::log(f_k(k, lam)) -
                 richardson_derivative(T_fn, y, h) * std::log(lam);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

WindowDefaults window_defaults(double n, double r) {
  return {std::pow(r / n, 0.4), std::pow(std::pow(r, 4) / n, 0.4)};
}

double gpre_asymptotic_log(long n, long m) {
  double nd = static_cast<double>(n);
  OptimumPoint opt = optimum(nd, static_cast<double>(m));
  return std::log(std::sqrt(3.0) / (std::numbers::pi * nd)) + std::lgamma(nd + 1) + nd * opt.value;
}

}  // namespace hypercount
