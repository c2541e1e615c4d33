#include "hypercount/tpoisson.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hypercount/errors.hpp"
#include "hypercount/special_fn.hpp"

namespace hypercount {

namespace {

constexpr double kTailMass = 1e-16;
constexpr double kMaxCells = 1e8;
constexpr double kRejectionFloor = 1e-3;

std::vector<double> excess_pmf(const TruncatedPoisson& d, long max_excess) {
  long top = std::min<long>(max_excess, d.support_max() - d.k());
  std::vector<double> p(static_cast<std::size_t>(top + 1));
  for (long s = 0; s <= top; ++s) p[s] = d.pmf(d.k() + s);
  return p;
}

long checked_excess(const SigmaEvent& ev) {
  if (ev.n_vars <= 0) throw DomainError("sigma event: n_vars must be positive");
  long e = ev.target_sum - static_cast<long>(ev.dist.k()) * ev.n_vars;
  if (e >= 0 && static_cast<double>(ev.n_vars + 1) * static_cast<double>(e + 1) > kMaxCells)
    throw ResourceError("sigma event: DP table exceeds 1e8 cells");
  return e;
}

}  // namespace

TruncatedPoisson::TruncatedPoisson(int k, double lambda) : k_(k), lambda_(lambda), log_fk_(0.0) {
  if (k < 0) throw DomainError("truncated Poisson: k must be nonnegative");
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw DomainError("truncated Poisson: lambda must be finite and nonnegative");
  if (lambda == 0.0) {
    cdf_ = {1.0};
    return;
  }
  log_fk_ = std::log(f_k(k, lambda));
  double cum = 0.0;
  for (long j = k;; ++j) {
    cum += pmf(j);
    cdf_.push_back(cum);
    if (j + 1 > lambda) {
      double ratio = lambda / (j + 2);
      if (pmf(j + 1) / (1 - ratio) < kTailMass) break;
    }
    if (cdf_.size() > 200000) break;
  }
}

double TruncatedPoisson::log_pmf(long j) const {
  if (j < k_) return -INFINITY;
  if (lambda_ == 0.0) return j == k_ ? 0.0 : -INFINITY;
  return j * std::log(lambda_) - std::lgamma(j + 1.0) - log_fk_;
}

double TruncatedPoisson::pmf(long j) const {
  if (j < k_) return 0.0;
  if (lambda_ == 0.0) return j == k_ ? 1.0 : 0.0;
  if (j > 100) return std::exp(log_pmf(j));
  return std::pow(lambda_, static_cast<double>(j)) / std::tgamma(j + 1.0) / std::exp(log_fk_);
}

double TruncatedPoisson::mean() const {
  if (lambda_ == 0.0) return k_;
  return lambda_ * f_k(k_ - 1, lambda_) / f_k(k_, lambda_);
}

double TruncatedPoisson::variance() const {
  if (lambda_ == 0.0) return 0.0;
  double c = mean();
  double eta = lambda_ * f_k(k_ - 2, lambda_) / f_k(k_ - 1, lambda_);
  return c * (1 + eta - c);
}

long TruncatedPoisson::sample(Rng& rng) const {
  double u = rng.uniform() * cdf_.back();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) --it;
  return k_ + static_cast<long>(it - cdf_.begin());
}

double sigma_prob_exact(const SigmaEvent& ev) {
  long e = checked_excess(ev);
  if (e < 0) return 0.0;
  if (ev.dist.lambda() == 0.0) return e == 0 ? 1.0 : 0.0;
  std::vector<double> p = excess_pmf(ev.dist, e);
  std::vector<double> dp(static_cast<std::size_t>(e + 1), 0.0), next(dp.size());
  dp[0] = 1.0;
  for (long i = 0; i < ev.n_vars; ++i) {
    for (long t = 0; t <= e; ++t) {
      double acc = 0.0;
      long top = std::min<long>(t, static_cast<long>(p.size()) - 1);
      for (long s = 0; s <= top; ++s) acc += dp[t - s] * p[s];
      next[t] = acc;
    }
    dp.swap(next);
  }
  return dp[e];
}

double sigma_prob_poisson_regime(const SigmaEvent& ev) {
  long r = ev.target_sum - static_cast<long>(ev.dist.k()) * ev.n_vars;
  if (r < 0) return 0.0;
  if (r == 0) return 1.0;
  double rr = static_cast<double>(r);
  return std::exp(-rr + rr * std::log(rr) - std::lgamma(rr + 1));
}

double sigma_prob_gaussian_regime(const SigmaEvent& ev) {
  double n = static_cast<double>(ev.n_vars);
  double c = static_cast<double>(ev.target_sum) / n;
  double l = ev.dist.lambda();
  int k = ev.dist.k();
  double eta = l == 0.0 ? k - 1.0 : l * f_k(k - 2, l) / f_k(k - 1, l);
  return 1.0 / std::sqrt(2 * std::numbers::pi * n * c * (1 + eta - c));
}

double sigma_prob_asymptotic(const SigmaEvent& ev) {
  long r = ev.target_sum - static_cast<long>(ev.dist.k()) * ev.n_vars;
  if (r < 0) return 0.0;
  if (static_cast<double>(r) <= std::log(static_cast<double>(ev.n_vars)))
    return sigma_prob_poisson_regime(ev);
  return sigma_prob_gaussian_regime(ev);
}

ConditionedSampler::ConditionedSampler(const SigmaEvent& ev) {
  long e = checked_excess(ev);
  n_ = ev.n_vars;
  k_ = ev.dist.k();
  excess_ = e;
  if (e < 0) return;
  if (ev.dist.lambda() == 0.0) {
    p_ = {1.0};
  } else {
    p_ = excess_pmf(ev.dist, e);
  }
  std::size_t w = static_cast<std::size_t>(e + 1);
  back_.assign(static_cast<std::size_t>(n_ + 1) * w, 0.0);
  back_[static_cast<std::size_t>(n_) * w] = 1.0;
  for (long i = n_ - 1; i >= 0; --i) {
    const double* nx = &back_[static_cast<std::size_t>(i + 1) * w];
    double* cur = &back_[static_cast<std::size_t>(i) * w];
    for (long t = 0; t <= e; ++t) {
      double acc = 0.0;
      long top = std::min<long>(t, static_cast<long>(p_.size()) - 1);
      for (long s = 0; s <= top; ++s) acc += p_[s] * nx[t - s];
      cur[t] = acc;
    }
  }
  prob_ = back_[static_cast<std::size_t>(e)];
}

std::vector<long> ConditionedSampler::sample(Rng& rng) const {
  if (!(prob_ > 0.0)) throw DomainError("sample_conditioned: impossible target");
  std::size_t w = static_cast<std::size_t>(excess_ + 1);
  std::vector<long> out(static_cast<std::size_t>(n_));
  long rem = excess_;
  for (long i = 0; i < n_; ++i) {
    const double* nx = &back_[static_cast<std::size_t>(i + 1) * w];
    long top = std::min<long>(rem, static_cast<long>(p_.size()) - 1);
    double total = back_[static_cast<std::size_t>(i) * w + rem];
    double u = rng.uniform() * total, acc = 0.0;
    long pick = -1;
    for (long s = 0; s <= top; ++s) {
      double wgt = p_[s] * nx[rem - s];
      if (wgt <= 0.0) continue;
      acc += wgt;
      pick = s;
      if (u < acc) break;
    }
    out[i] = k_ + pick;
    rem -= pick;
  }
  return out;
}

std::vector<long> sample_conditioned(const SigmaEvent& ev, Rng& rng) {
  double prob = sigma_prob_exact(ev);
  if (!(prob > 0.0)) throw DomainError("sample_conditioned: impossible target");
  if (prob >= kRejectionFloor) {
    std::vector<long> y(static_cast<std::size_t>(ev.n_vars));
    for (;;) {
      long sum = 0;
      for (auto& v : y) {
        v = ev.dist.sample(rng);
        sum += v;
      }
      if (sum == ev.target_sum) return y;
    }
  }
  return ConditionedSampler(ev).sample(rng);
}

std::vector<double> conditioned_first_marginal(const SigmaEvent& ev) {
  ConditionedSampler cs(ev);
  if (!(cs.probability() > 0.0)) throw DomainError("conditioned marginal: impossible target");
  SigmaEvent rest{ev.n_vars - 1, 0, ev.dist};
  long e = ev.target_sum - static_cast<long>(ev.dist.k()) * ev.n_vars;
  std::vector<double> out(static_cast<std::size_t>(e + 1), 0.0);
  for (long s = 0; s <= e; ++s) {
    double tail = 1.0;
    if (ev.n_vars > 1) {
      rest.target_sum = static_cast<long>(ev.dist.k()) * rest.n_vars + (e - s);
      tail = sigma_prob_exact(rest);
    } else {
      tail = s == e ? 1.0 : 0.0;
    }
    out[s] = ev.dist.pmf(ev.dist.k() + s) * tail / cs.probability();
  }
  return out;
}

}  // namespace hypercount
