#include "hypercount/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hypercount/errors.hpp"
#include "hypercount/special_fn.hpp"

namespace hypercount {

namespace {

constexpr double kLambdaCap = 700.0;
constexpr double kBoundaryTol = 1e-12;

// f_1(2l)/f_2(2l), switching to the e^{-2l}-scaled form once the direct one overflows.
double ratio_f1_f2_double(double l) {
  if (l < 1.0) return f_k(1, 2 * l) / f_k(2, 2 * l);
  double u = std::exp(-2 * l);
  return (1 - u) / (1 - u * (1 + 2 * l));
}

template <class Value, class DLog>
LambdaSolution solve_increasing(Value value, DLog dlog, double target, double boundary,
                                Equation eq, int k) {
  LambdaSolution s;
  s.equation = eq;
  s.k = k;
  if (!std::isfinite(target)) throw DomainError(equation_name(eq, k) + ": target must be finite");
  if (target - boundary <= kBoundaryTol) {
    if (target <= boundary)
      throw DomainError(equation_name(eq, k) + ": target must exceed " + std::to_string(boundary));
    s.residual = boundary - target;
    return s;
  }
  double lo = 0.0, hi = 1.0;
  while (value(hi) < target) {
    lo = hi;
    if (hi >= kLambdaCap)
      throw DomainError("range error: " + equation_name(eq, k) + " target " +
                        std::to_string(target) + " needs lambda above 700");
    hi = std::min(2 * hi, kLambdaCap);
  }
  for (int it = 0; it < 400 && hi - lo > 1e-13 * std::min(1.0, hi); ++it) {
    double mid = 0.5 * (lo + hi);
    if (value(mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  double x = 0.5 * (lo + hi);
  double fx = value(x);
  for (int it = 0; it < 3; ++it) {
    double slope = fx * dlog(x);
    if (!(slope > 0) || !std::isfinite(slope)) break;
    double cand = x - (fx - target) / slope;
    if (!(cand >= lo && cand <= hi)) break;
    double fc = value(cand);
    if (std::abs(fc - target) > std::abs(fx - target)) break;
    x = cand;
    fx = fc;
  }
  s.lambda = x;
  s.residual = fx - target;
  s.bracket_lo = lo;
  s.bracket_hi = hi;
  return s;
}

}  // namespace

std::string equation_name(Equation eq, int k) {
  switch (eq) {
    case Equation::TpoMean: return "TPO_MEAN(" + std::to_string(k) + ")";
    case Equation::Core: return "CORE";
    case Equation::Global: return "GLOBAL";
    case Equation::Bck: return "BCK(" + std::to_string(k) + ")";
  }
  return "?";
}

double tpo_mean_value(int k, double lambda) {
  if (lambda == 0.0) return k;
  return lambda * f_k(k - 1, lambda) / f_k(k, lambda);
}

double core_equation_value(double lambda) {
  if (lambda == 0.0) return 1.5;
  if (lambda < 1.0) return lambda * f_k(1, lambda) * g_k(2, lambda) / f_k(2, 2 * lambda);
  double u = std::exp(-lambda);
  return lambda * (1 - u) * (1 + 2 * u) / (1 - u * u * (1 + 2 * lambda));
}

double global_equation_value(double lambda) {
  if (lambda == 0.0) return 1.5;
  if (lambda < 1.0) {
    double e = std::exp(lambda);
    return lambda * (e * e + e + 1) / std::expm1(2 * lambda);
  }
  double u = std::exp(-lambda);
  return lambda * (1 + u + u * u) / (1 - u * u);
}

double global_equation_alt_value(double lambda) {
  if (lambda == 0.0) return 0.0;
  if (lambda < 1.0) {
    double f1 = f_k(1, lambda), g1 = g_k(1, lambda);
    return (2 * lambda * f1 * g_k(2, lambda) - 3 * f_k(2, 2 * lambda)) / (f1 * g1);
  }
  double u = std::exp(-lambda);
  return (2 * lambda * (1 - u) * (1 + 2 * u) - 3 * (1 - u * u * (1 + 2 * lambda))) / (1 - u * u);
}

LambdaSolution solve_tpo_mean(int k, double c) {
  if (k < 1) throw DomainError("solve_tpo_mean: k must be positive");
  auto value = [k](double l) { return tpo_mean_value(k, l); };
  auto dlog = [k](double l) {
    double c = tpo_mean_value(k, l);
    double eta = l * f_k(k - 2, l) / f_k(k - 1, l);
    return (1 + eta - c) / l;
  };
  return solve_increasing(value, dlog, c, k, Equation::TpoMean, k);
}

LambdaSolution solve_core_lambda(double three_m_over_n) {
  auto dlog = [](double l) {
    double u = std::exp(-l);
    return 1 / l + 1 / (-std::expm1(-l)) + 1 / (1 + 2 * u) - 2 * ratio_f1_f2_double(l);
  };
  return solve_increasing(core_equation_value, dlog, three_m_over_n, 1.5, Equation::Core, 0);
}

LambdaSolution solve_global_lambda_ratio(double three_M_over_N) {
  auto dlog = [](double l) {
    double u = std::exp(-l);
    return 1 / l + (2 + u) / (1 + u + u * u) - 2 / (1 - u * u);
  };
  return solve_increasing(global_equation_value, dlog, three_M_over_N, 1.5, Equation::Global, 0);
}

LambdaSolution solve_global_lambda(long long M, long long N) {
  if (N <= 0 || M <= 0) throw DomainError("solve_global_lambda: M and N must be positive");
  if (2 * M <= N) throw DomainError("solve_global_lambda: need M > N/2");
  return solve_global_lambda_ratio(3.0 * static_cast<double>(M) / static_cast<double>(N));
}

double bck_map(int k, double zeta, double r) {
  double lr = std::log(r);
  double a = -std::expm1(lr);
  double b = -std::expm1((k - 1) * lr);
  double c = -std::expm1(k * lr);
  return std::exp(-zeta * a * b / c);
}

BckSolution solve_bck_r(int k, double zeta) {
  if (k < 2) throw DomainError("solve_bck_r: k must be at least 2");
  double zmin = static_cast<double>(k) / (k - 1);
  if (!(zeta > zmin) || !std::isfinite(zeta))
    throw DomainError("solve_bck_r: zeta must exceed k/(k-1)");
  BckSolution s;
  double r = std::exp(-zeta);
  const double omega = 0.5;
  for (int it = 0; it < 500; ++it) {
    double next = (1 - omega) * r + omega * bck_map(k, zeta, r);
    s.iterations = it + 1;
    if (std::abs(next - r) <= 1e-16) {
      r = next;
      break;
    }
    r = next;
  }
  double res = r - bck_map(k, zeta, r);
  if (r > 0 && r < 1 - 1e-6 && std::abs(res) <= 1e-14) {
    s.r = r;
    s.residual = res;
    return s;
  }
  // In lambda = -ln r the root is the sign change of excess(l) on (0, zeta].
  auto excess = [k, zeta](double l) {
    return zeta * std::expm1(-l) * std::expm1(-(k - 1) * l) / -std::expm1(-k * l) - l;
  };
  double lo = 0.0, hi = zeta;
  for (int it = 0; it < 300 && hi - lo > 1e-16 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    if (excess(mid) > 0)
      lo = mid;
    else
      hi = mid;
    ++s.iterations;
  }
  s.used_bisection = true;
  s.r = std::exp(-0.5 * (lo + hi));
  s.residual = s.r - bck_map(k, zeta, s.r);
  return s;
}

}  // namespace hypercount
