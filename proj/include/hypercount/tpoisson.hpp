#pragma once

#include <vector>

#include "hypercount/rng.hpp"

namespace hypercount {

// Poisson(lambda) conditioned on being at least k. lambda = 0 is the point mass at k.
class TruncatedPoisson {
 public:
  TruncatedPoisson(int k, double lambda);

  int k() const { return k_; }
  double lambda() const { return lambda_; }

  double pmf(long j) const;
  double log_pmf(long j) const;
  double mean() const;
  double variance() const;
  // Largest value kept: the tail beyond it carries mass below 1e-16.
  long support_max() const { return k_ + static_cast<long>(cdf_.size()) - 1; }

  long sample(Rng& rng) const;

 private:
  int k_;
  double lambda_;
  double log_fk_;
  std::vector<double> cdf_;  // cdf_[i] = P(Y <= k + i)
};

struct SigmaEvent {
  long n_vars;
  long target_sum;
  TruncatedPoisson dist;
};

// P(Y_1 + ... + Y_n = Q) for iid truncated Poisson Y_i, by convolution.
double sigma_prob_exact(const SigmaEvent& ev);

// Closed-form estimates: e^{-R} R^R / R! with R = Q - k n when R <= ln n,
// otherwise the local CLT value 1/sqrt(2 pi n c (1 + eta - c)).
double sigma_prob_asymptotic(const SigmaEvent& ev);
double sigma_prob_poisson_regime(const SigmaEvent& ev);
double sigma_prob_gaussian_regime(const SigmaEvent& ev);

// A draw of (Y_1..Y_n) conditioned on the sum. Rejection when the event is not
// rare, otherwise sequential sampling against the backward DP table.
std::vector<long> sample_conditioned(const SigmaEvent& ev, Rng& rng);

// Precomputed backward table for repeated conditioned draws of one event.
class ConditionedSampler {
 public:
  explicit ConditionedSampler(const SigmaEvent& ev);
  double probability() const { return prob_; }
  std::vector<long> sample(Rng& rng) const;

 private:
  long n_ = 0;
  long excess_ = 0;
  int k_ = 0;
  std::vector<double> p_;     // p_[s] = pmf(k + s)
  std::vector<double> back_;  // back_[i * (excess_ + 1) + e] = P(sum of the last n - i excesses = e)
  double prob_ = 0.0;
};

// Conditional marginal law of Y_1 given the sum, indexed from k.
std::vector<double> conditioned_first_marginal(const SigmaEvent& ev);

}  // namespace hypercount
