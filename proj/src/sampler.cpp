#include "hypercount/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <numeric>
#include <thread>

#include "hypercount/asymptotics.hpp"
#include "hypercount/errors.hpp"
#include "hypercount/solvers.hpp"
#include "hypercount/tpoisson.hpp"

namespace hypercount {

namespace {

constexpr long kChunk = 256;

std::vector<int> random_subset(int N, int k, Rng& rng) {
  std::vector<int> all(static_cast<std::size_t>(N));
  std::iota(all.begin(), all.end(), 0);
  // partial Fisher-Yates
  for (int i = 0; i < k; ++i) std::swap(all[i], all[i + rng.below(static_cast<std::size_t>(N - i))]);
  all.resize(static_cast<std::size_t>(k));
  std::sort(all.begin(), all.end());
  return all;
}

template <class Task>
void run_tasks(std::size_t count, int jobs, Task&& task) {
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(std::max<std::size_t>(count, 1))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int j = 0; j < jobs; ++j)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) task(i);
    });
  for (auto& t : pool) t.join();
}

long sum_of(const std::vector<int>& d) { return std::accumulate(d.begin(), d.end(), 0L); }

}  // namespace

GcoreSample sample_gcore(int n, int m, int nu1, const std::vector<int>& d, Rng& rng) {
  if (nu1 > m) throw DomainError("nu1 exceeds m");
  if (nu1 < 0 || nu1 > n) throw DomainError("sample_gcore: need 0 <= nu1 <= n");
  if (static_cast<int>(d.size()) != n - nu1) throw DomainError("sample_gcore: |d| must be n - nu1");
  for (int x : d)
    if (x < 2) throw DomainError("sample_gcore: degrees must be at least 2");
  if (sum_of(d) != 3L * m - nu1) throw DomainError("sample_gcore: degree sum must be 3m - nu1");

  std::vector<int> V1 = random_subset(n, nu1, rng);
  std::vector<int> deg(static_cast<std::size_t>(n), 1), first(static_cast<std::size_t>(n), 0);
  for (int v = 0, i = 0, j = 0; v < n; ++v) {
    if (j < nu1 && V1[j] == v)
      ++j;
    else
      deg[v] = d[i++];
  }
  for (int v = 1; v < n; ++v) first[v] = first[v - 1] + deg[v - 1];

  GcoreSample s;
  s.config.assign(static_cast<std::size_t>(3 * m), -1);
  std::vector<int> bins = random_subset(m, nu1, rng);
  rng.shuffle(V1);
  for (int i = 0; i < nu1; ++i) s.config[3 * bins[i] + rng.below(3)] = first[V1[i]];
  std::vector<int> rest;
  for (int v = 0; v < n; ++v)
    if (deg[v] >= 2)
      for (int j = 0; j < deg[v]; ++j) rest.push_back(first[v] + j);
  rng.shuffle(rest);
  std::size_t k = 0;
  for (int& c : s.config)
    if (c < 0) c = rest[k++];

  std::vector<int> owner;
  for (int v = 0; v < n; ++v)
    for (int j = 0; j < deg[v]; ++j) owner.push_back(v);
  s.graph.n = n;
  s.graph.phi.resize(static_cast<std::size_t>(m));
  for (int e = 0; e < m; ++e)
    for (int j = 0; j < 3; ++j) s.graph.phi[e][j] = owner[s.config[3 * e + j]];
  return s;
}

BigCount gcore_configuration_count(int n, int m, int nu1) {
  BigCount three = 1;
  for (int i = 0; i < nu1; ++i) three *= 3;
  return binom(n, nu1) * binom(m, nu1) * three * factorial(nu1) * factorial(3L * m - nu1);
}

KernelSample sample_kernel(const std::vector<int>& V, int m3, int k1, int k2, const std::vector<int>& d,
                           Rng& rng) {
  int n3 = static_cast<int>(d.size());
  int K = k1 + k2 + n3;
  if (k1 < 0 || k2 < 0 || m3 < 0) throw DomainError("sample_kernel: negative parameter");
  if (static_cast<int>(V.size()) != K) throw DomainError("sample_kernel: |V| must be k1 + k2 + |d|");
  for (int x : d)
    if (x < 3) throw DomainError("sample_kernel: degrees must be at least 3");
  long Q3 = sum_of(d), P3 = 3L * m3, T3 = P3 - k1 - 2L * k2;
  if (T3 < 0) throw DomainError("sample_kernel: T3 < 0");
  long twice_m2p = Q3 - T3 + k1;
  if (twice_m2p < 0 || twice_m2p % 2) throw DomainError("sample_kernel: point counts do not balance");
  long m2p = twice_m2p / 2, P2 = 2 * m2p, T2 = P2 - k1;
  if (T2 < 0) throw DomainError("sample_kernel: T2 < 0");

  std::vector<int> sorted_v = V;
  std::sort(sorted_v.begin(), sorted_v.end());
  std::vector<int> pos3 = random_subset(K, n3, rng);
  std::vector<char> is3(static_cast<std::size_t>(K), 0);
  for (int p : pos3) is3[p] = 1;
  std::vector<int> two;  // degree-2 vertex labels
  for (int i = 0; i < K; ++i)
    if (!is3[i]) two.push_back(sorted_v[i]);
  std::vector<int> type1 = random_subset(static_cast<int>(two.size()), k1, rng);
  std::vector<char> t1(two.size(), 0);
  for (int i : type1) t1[i] = 1;
  std::vector<int> U, D;  // vertex labels, one entry per point
  for (std::size_t i = 0; i < two.size(); ++i) {
    if (t1[i]) {
      U.push_back(two[i]);
      D.push_back(two[i]);
    } else {
      D.push_back(two[i]);
      D.push_back(two[i]);
    }
  }
  std::vector<int> big;  // points of vertices of degree >= 3
  for (int i = 0; i < n3; ++i)
    for (int j = 0; j < d[i]; ++j) big.push_back(sorted_v[pos3[i]]);

  KernelSample s;
  s.phi.assign(static_cast<std::size_t>(P3 + P2), -1);
  std::vector<int> e3(static_cast<std::size_t>(P3)), e2(static_cast<std::size_t>(P2));
  std::iota(e3.begin(), e3.end(), 0);
  std::iota(e2.begin(), e2.end(), static_cast<int>(P3));
  rng.shuffle(e3);
  rng.shuffle(e2);
  for (std::size_t i = 0; i < D.size(); ++i) s.phi[e3[i]] = D[i];
  for (std::size_t i = 0; i < U.size(); ++i) s.phi[e2[i]] = U[i];
  rng.shuffle(big);
  std::size_t b = 0;
  for (int& v : s.phi)
    if (v < 0) v = big[b++];

  Kernel& k = s.kernel;
  k.n = sorted_v.empty() ? 0 : sorted_v.back() + 1;
  k.vertices = sorted_v;
  for (long e = 0; e < m3; ++e) k.edges3.push_back({s.phi[3 * e], s.phi[3 * e + 1], s.phi[3 * e + 2]});
  for (long e = 0; e < m2p; ++e) k.edges2.push_back({s.phi[P3 + 2 * e], s.phi[P3 + 2 * e + 1]});
  return s;
}

double fraction_two_edges_one_deg2(const Kernel& k) {
  if (k.edges2.empty()) return 0.0;
  std::vector<int> deg = kernel_degrees(k);
  long one = 0;
  for (const auto& e : k.edges2) one += ((deg[e[0]] == 2) + (deg[e[1]] == 2)) == 1;
  return static_cast<double>(one) / static_cast<double>(k.edges2.size());
}

Multigraph sample_prekernel(int n, int m, const PreX& x, const std::vector<int>& d, Rng& rng) {
  check_region(n, m, x);
  PreDerived pd = pre_derived(n, m, x);
  if (static_cast<long>(d.size()) != pd.n3) throw DomainError("sample_prekernel: |d| must be n3");
  if (sum_of(d) != pd.Q3) throw DomainError("sample_prekernel: degree sum must be Q3");
  if (x.k0 > 0 && pd.m2p == 0) throw DomainError("sample_prekernel: no 2-edge to split");

  std::vector<int> V = random_subset(n, static_cast<int>(n - x.nu1 - x.k0), rng);
  std::vector<int> M3 = random_subset(m, static_cast<int>(pd.m3), rng);
  KernelSample ks = sample_kernel(V, static_cast<int>(pd.m3), static_cast<int>(x.k1),
                                  static_cast<int>(x.k2), d, rng);

  std::vector<int> rest;
  {
    std::vector<char> inV(static_cast<std::size_t>(n), 0);
    for (int v : V) inV[v] = 1;
    for (int v = 0; v < n; ++v)
      if (!inV[v]) rest.push_back(v);
  }
  std::vector<int> pick = random_subset(static_cast<int>(rest.size()), static_cast<int>(x.k0), rng);
  std::vector<char> split(rest.size(), 0);
  for (int i : pick) split[i] = 1;
  std::vector<Pair> edges2 = ks.kernel.edges2;
  std::vector<int> V1;
  for (std::size_t i = 0; i < rest.size(); ++i) {
    if (!split[i]) {
      V1.push_back(rest[i]);
      continue;
    }
    std::size_t j = rng.below(edges2.size());
    Pair e = edges2[j];
    edges2[j] = {e[0], rest[i]};
    edges2.push_back({rest[i], e[1]});
  }

  std::vector<int> labels;
  {
    std::vector<char> in3(static_cast<std::size_t>(m), 0);
    for (int e : M3) in3[e] = 1;
    for (int e = 0; e < m; ++e)
      if (!in3[e]) labels.push_back(e);
  }
  rng.shuffle(labels);
  rng.shuffle(V1);
  Multigraph g;
  g.n = n;
  g.phi.resize(static_cast<std::size_t>(m));
  for (std::size_t i = 0; i < M3.size(); ++i) g.phi[M3[i]] = ks.kernel.edges3[i];
  for (std::size_t i = 0; i < edges2.size(); ++i) {
    Triple t{edges2[i][0], edges2[i][1], V1[i]};
    for (int j = 2; j > 0; --j) std::swap(t[j], t[rng.below(static_cast<std::size_t>(j + 1))]);
    g.phi[labels[i]] = t;
  }
  return g;
}

namespace {

struct PrekernelJob {
  int n, m;
  PreX x;
  std::vector<int> fixed_d;  // used when there is nothing to sample
  std::unique_ptr<ConditionedSampler> sampler;

  PrekernelJob(int n_, int m_, const PreX& x_) : n(n_), m(m_), x(x_) {
    check_region(n, m, x);
    PreDerived pd = pre_derived(n, m, x);
    if (pd.n3 > 0 && pd.Q3 > 3 * pd.n3) {
      double lam = solve_tpo_mean(3, static_cast<double>(pd.Q3) / pd.n3).lambda;
      sampler = std::make_unique<ConditionedSampler>(SigmaEvent{pd.n3, pd.Q3, TruncatedPoisson(3, lam)});
    } else {
      fixed_d.assign(static_cast<std::size_t>(pd.n3), 3);
    }
  }

  Multigraph draw(Rng& rng) const {
    if (!sampler) return sample_prekernel(n, m, x, fixed_d, rng);
    std::vector<long> y = sampler->sample(rng);
    return sample_prekernel(n, m, x, std::vector<int>(y.begin(), y.end()), rng);
  }
};

struct Tally {
  long trials = 0, simple = 0, connected = 0, both = 0;
};

// Chunk c of a run always uses stream c of the run's generator.
Tally run_prekernel(const PrekernelJob& job, long trials, const Rng& rng, int jobs) {
  std::size_t chunks = static_cast<std::size_t>((trials + kChunk - 1) / kChunk);
  std::vector<Tally> out(chunks);
  run_tasks(chunks, jobs, [&](std::size_t c) {
    Rng r = rng.split(c);
    long len = std::min(kChunk, trials - static_cast<long>(c) * kChunk);
    Tally& t = out[c];
    for (long i = 0; i < len; ++i) {
      Multigraph g = job.draw(r);
      bool s = is_simple(g), k = is_connected(g);
      ++t.trials;
      t.simple += s;
      t.connected += k;
      t.both += s && k;
    }
  });
  Tally total;
  for (const auto& t : out) {
    total.trials += t.trials;
    total.simple += t.simple;
    total.connected += t.connected;
    total.both += t.both;
  }
  return total;
}

}  // namespace

McCount prekernel_success(int n, int m, const PreX& x, long trials, const Rng& rng, int jobs) {
  PrekernelJob job(n, m, x);
  Tally t = run_prekernel(job, trials, rng, jobs);
  return {t.trials, t.both};
}

GpreEstimate estimate_gpre(int n, int m, const Rng& rng, long trials, int jobs, long min_per_point) {
  GpreEstimate est;
  double log_nfact = std::lgamma(n + 1.0);
  for (long nu1 = 0; nu1 <= n; ++nu1)
    for (long k0 = 0; k0 <= n - nu1; ++k0)
      for (long k1 = 0; k1 <= n - nu1 - k0; ++k1)
        for (long k2 = 0; k2 <= n - nu1 - k0 - k1; ++k2) {
          PreX x{nu1, k0, k1, k2};
          if (!in_region(n, m, x)) continue;
          Weight w = w_pre(n, m, x);
          if (!std::isfinite(w.log_value)) continue;
          PreDerived pd = pre_derived(n, m, x);
          double p_sigma = 1.0;
          if (!w.boundary && pd.n3 > 0)
            p_sigma = sigma_prob_exact(SigmaEvent{pd.n3, pd.Q3, TruncatedPoisson(3, w.lambda)});
          double weight = std::exp(log_nfact + w.log_value) * p_sigma;
          if (weight > 0) est.terms.push_back({x, weight, 0, 0});
        }
  if (est.terms.empty()) throw DomainError("estimate_gpre: the lattice window is empty");
  double total_w = 0;
  for (const auto& t : est.terms) total_w += t.weight;
  for (auto& t : est.terms)
    t.trials = std::max(min_per_point, std::lround(static_cast<double>(trials) * t.weight / total_w));

  std::vector<PrekernelJob> jobs_x;
  jobs_x.reserve(est.terms.size());
  for (const auto& t : est.terms) jobs_x.emplace_back(n, m, t.x);
  struct Task {
    std::size_t term;
    long first, len;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < est.terms.size(); ++i)
    for (long f = 0; f < est.terms[i].trials; f += kChunk)
      tasks.push_back({i, f, std::min(kChunk, est.terms[i].trials - f)});
  std::vector<long> hits(tasks.size(), 0);
  run_tasks(tasks.size(), jobs, [&](std::size_t k) {
    const Task& t = tasks[k];
    Rng r = rng.split(t.term).split(static_cast<std::uint64_t>(t.first / kChunk));
    for (long i = 0; i < t.len; ++i) {
      Multigraph g = jobs_x[t.term].draw(r);
      hits[k] += is_simple(g) && is_connected(g);
    }
  });
  for (std::size_t k = 0; k < tasks.size(); ++k) est.terms[tasks[k].term].successes += hits[k];

  double var = 0;
  for (const auto& t : est.terms) {
    double tr = static_cast<double>(t.trials);
    double p = t.successes / tr;
    // shrunk rate keeps the variance positive when a term saw 0 or all successes
    double q = (t.successes + 0.5) / (tr + 1);
    est.value += t.weight * p;
    var += t.weight * t.weight * q * (1 - q) / tr;
    est.trials += t.trials;
  }
  est.stderr_ = std::sqrt(var);
  est.log_value = std::log(est.value);
  return est;
}

PreX lattice_optimum(int n, int m) {
  OptimumPoint opt = optimum(n, m);
  Vec4 c = opt.x.vec();
  long base[4];
  for (int i = 0; i < 4; ++i) base[i] = std::lround(c[i] * n);
  PreX best{};
  double best_log = -INFINITY;
  for (long a = -3; a <= 3; ++a)
    for (long b = -3; b <= 3; ++b)
      for (long e = -3; e <= 3; ++e)
        for (long f = -3; f <= 3; ++f) {
          PreX x{base[0] + a, base[1] + b, base[2] + e, base[3] + f};
          if (!in_region(n, m, x)) continue;
          double lv = w_pre(n, m, x).log_value;
          if (lv > best_log) {
            best_log = lv;
            best = x;
          }
        }
  if (!std::isfinite(best_log)) throw DomainError("lattice_optimum: no lattice point near x*");
  return best;
}

TrendPoint prekernel_trend_point(int n, int m, long trials, const Rng& rng, int jobs) {
  TrendPoint p;
  p.n = n;
  p.m = m;
  p.x = lattice_optimum(n, m);
  Tally t = run_prekernel(PrekernelJob(n, m, p.x), trials, rng, jobs);
  p.trials = t.trials;
  p.p_simple = static_cast<double>(t.simple) / t.trials;
  p.p_connected = static_cast<double>(t.connected) / t.trials;
  return p;
}

std::vector<std::pair<int, int>> trend_schedule() {
  std::vector<std::pair<int, int>> out;
  for (int n : {50, 100, 200}) out.emplace_back(n, n / 2 + static_cast<int>(std::ceil(std::pow(n, 0.8))));
  return out;
}

long BinModel::K() const { return std::accumulate(ts.begin(), ts.end(), 0L) - 2 * L; }

void check_bin_model(const BinModel& b) {
  for (const auto* side : {&b.ts, &b.ts2})
    for (int t : *side)
      if (t < 3 || t > 5) throw DomainError("bin model: bin sizes must lie in {3,4,5}");
  if (b.L < 0 || b.L2 < 0) throw DomainError("bin model: connector counts must be nonnegative");
  long left = std::accumulate(b.ts.begin(), b.ts.end(), 0L), right = std::accumulate(b.ts2.begin(), b.ts2.end(), 0L);
  if (left - 2 * b.L < 0 || right - 2 * b.L2 < 0) throw DomainError("bin model: more connector points than bin points");
  if (left - 2 * b.L != right - 2 * b.L2) throw DomainError("bin model: sum(ts) - 2L must equal sum(ts') - 2L'");
}

bool sample_bin_model(const BinModel& b, Rng& rng) {
  check_bin_model(b);
  int nl = static_cast<int>(b.ts.size()), nr = static_cast<int>(b.ts2.size());
  std::vector<int> parent(static_cast<std::size_t>(nl + nr));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto join = [&](int a, int c) { parent[find(a)] = find(c); };
  auto points = [](const std::vector<int>& ts, int offset) {
    std::vector<int> p;
    for (int i = 0; i < static_cast<int>(ts.size()); ++i)
      for (int j = 0; j < ts[i]; ++j) p.push_back(offset + i);
    return p;
  };
  std::vector<int> lp = points(b.ts, 0), rp = points(b.ts2, nl);
  rng.shuffle(lp);
  rng.shuffle(rp);
  for (long i = 0; i < b.L; ++i) join(lp[2 * i], lp[2 * i + 1]);
  for (long i = 0; i < b.L2; ++i) join(rp[2 * i], rp[2 * i + 1]);
  long K = b.K();
  for (long i = 0; i < K; ++i) join(lp[2 * b.L + i], rp[2 * b.L2 + i]);
  for (int v = 1; v < nl + nr; ++v)
    if (find(v) != find(0)) return false;
  return true;
}

BinModel bin_model_for_K(long K, long bins) {
  if (K < 0) throw DomainError("bin_model_for_K: K must be nonnegative");
  long N = bins < 0 ? K : bins;
  if (3 * N < K || (3 * N - K) % 2) throw DomainError("bin_model_for_K: 3N - K must be even and nonnegative");
  BinModel b;
  b.ts.assign(static_cast<std::size_t>(N), 3);
  b.ts2 = b.ts;
  b.L = b.L2 = (3 * N - K) / 2;
  return b;
}

long min_bins_for_K(long K) {
  long N = (K + 2) / 3;
  while ((3 * N - K) % 2) ++N;
  return N;
}

McCount bin_model_connectivity(const BinModel& b, long trials, const Rng& rng, int jobs) {
  check_bin_model(b);
  std::size_t chunks = static_cast<std::size_t>((trials + kChunk - 1) / kChunk);
  std::vector<long> hits(chunks, 0);
  run_tasks(chunks, jobs, [&](std::size_t c) {
    Rng r = rng.split(c);
    long len = std::min(kChunk, trials - static_cast<long>(c) * kChunk);
    for (long i = 0; i < len; ++i) hits[c] += sample_bin_model(b, r);
  });
  return {trials, std::accumulate(hits.begin(), hits.end(), 0L)};
}

}  // namespace hypercount
