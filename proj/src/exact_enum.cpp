#include "hypercount/exact_enum.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "hypercount/errors.hpp"
#include "hypercount/solvers.hpp"
#include "hypercount/special_fn.hpp"

namespace hypercount {

namespace {

using Mask = std::uint32_t;

std::vector<Mask> triple_masks(int n) {
  std::vector<Mask> out;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c) out.push_back((1u << a) | (1u << b) | (1u << c));
  return out;
}

bool masks_connected(const Mask* edges, int m, int n) {
  if (n <= 1) return true;
  if (m == 0) return false;
  Mask full = (n >= 32) ? ~0u : ((1u << n) - 1);
  Mask comp = edges[0];
  for (bool grew = true; grew;) {
    grew = false;
    for (int i = 0; i < m; ++i)
      if ((edges[i] & comp) && (edges[i] & ~comp)) {
        comp |= edges[i];
        grew = true;
      }
  }
  return comp == full;
}

// Calls visit(chosen, deg) for every m-subset of `tri` in lexicographic order,
// restricted to subsets whose first element is `first`.
template <class Visit>
void for_each_subset(const std::vector<Mask>& tri, int n, int m, int first, Visit&& visit) {
  std::vector<Mask> chosen(static_cast<std::size_t>(m));
  std::vector<int> deg(static_cast<std::size_t>(n), 0);
  int T = static_cast<int>(tri.size());
  auto add = [&](Mask e, int s) {
    for (Mask b = e; b; b &= b - 1) deg[std::countr_zero(b)] += s;
  };
  auto rec = [&](auto&& self, int depth, int start, Mask covered) -> void {
    if (depth == m) {
      visit(chosen.data(), deg);
      return;
    }
    int left = m - depth;
    int uncovered = n - std::popcount(covered);
    if (uncovered > 3 * left) return;
    for (int i = start; i <= T - left; ++i) {
      chosen[depth] = tri[i];
      add(tri[i], 1);
      self(self, depth + 1, i + 1, covered | tri[i]);
      add(tri[i], -1);
    }
  };
  if (m == 0) {
    visit(chosen.data(), deg);
    return;
  }
  if (first > T - m) return;
  chosen[0] = tri[first];
  add(tri[first], 1);
  rec(rec, 1, first + 1, tri[first]);
}

double subset_cost(int n, int m) {
  double t = static_cast<double>(n) * (n - 1) * (n - 2) / 6.0;
  return std::exp(std::lgamma(t + 1) - std::lgamma(m + 1.0) - std::lgamma(t - m + 1));
}

template <class Work>
void run_partitioned(int T, int jobs, Work&& work) {
  jobs = std::max(1, jobs);
  if (jobs == 1) {
    for (int f = 0; f < T; ++f) work(0, f);
    return;
  }
  std::vector<std::thread> pool;
  for (int j = 0; j < jobs; ++j)
    pool.emplace_back([&, j] {
      for (int f = j; f < T; f += jobs) work(j, f);
    });
  for (auto& t : pool) t.join();
}

BigCount pow_big(long base, long e) {
  BigCount r = 1;
  for (long i = 0; i < e; ++i) r *= base;
  return r;
}

double lfact(long x) { return std::lgamma(static_cast<double>(x) + 1.0); }

}  // namespace

BigCount factorial(long n) {
  if (n < 0) throw DomainError("factorial: negative argument");
  BigCount r = 1;
  for (long i = 2; i <= n; ++i) r *= i;
  return r;
}

BigCount binom(const BigCount& a, long b) {
  if (b < 0 || a < 0 || a < b) return 0;
  BigCount r = 1;
  for (long i = 0; i < b; ++i) {
    r *= a - i;
    r /= i + 1;
  }
  return r;
}

BigCount binom(long a, long b) { return binom(BigCount(a), b); }

BigCount count_forests(long N, long n, int k) {
  if (k < 2) throw DomainError("count_forests: k must be at least 2");
  if (n < 0 || n > N) throw DomainError("count_forests: need 0 <= n <= N");
  if (n == N) return 1;
  if ((N - n) % (k - 1) != 0) return 0;
  long mp = (N - n) / (k - 1);
  BigCount num = BigCount(n) * factorial(N - n) * pow_big(N, mp - 1);
  BigCount den = factorial(mp) * pow_big(1, 0);
  BigCount kf = factorial(k - 1);
  for (long i = 0; i < mp; ++i) den *= kf;
  if (num % den != 0) throw DomainError("count_forests: non-integral value");
  return num / den;
}

BigCount count_forests_bruteforce(int N, int n, int k) {
  if (N > 7) throw ResourceError("count_forests_bruteforce: N must be at most 7");
  if (k < 2) throw DomainError("count_forests_bruteforce: k must be at least 2");
  if (n < 0 || n > N) throw DomainError("count_forests_bruteforce: need 0 <= n <= N");
  if ((N - n) % (k - 1) != 0) return 0;
  int mp = (N - n) / (k - 1);
  std::vector<std::vector<int>> edges;
  std::vector<int> pick(static_cast<std::size_t>(N), 0);
  std::fill(pick.begin(), pick.begin() + std::min(k, N), 1);
  if (k <= N) {
    do {
      std::vector<int> e;
      for (int v = 0; v < N; ++v)
        if (pick[v]) e.push_back(v);
      edges.push_back(e);
    } while (std::prev_permutation(pick.begin(), pick.end()));
  }
  int E = static_cast<int>(edges.size());
  if (mp > E) return 0;
  std::vector<int> sel(static_cast<std::size_t>(E), 0);
  std::fill(sel.begin(), sel.begin() + mp, 1);
  long count = 0;
  do {
    std::vector<int> parent(static_cast<std::size_t>(N));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    bool ok = true;
    for (int i = 0; i < E && ok; ++i) {
      if (!sel[i]) continue;
      std::vector<int> roots;
      for (int v : edges[i]) roots.push_back(find(v));
      std::sort(roots.begin(), roots.end());
      if (std::adjacent_find(roots.begin(), roots.end()) != roots.end()) ok = false;
      for (int r : roots) parent[r] = roots[0];
    }
    if (!ok) continue;
    std::vector<int> root_of(static_cast<std::size_t>(N), 0);
    for (int r = 0; r < n && ok; ++r) {
      if (root_of[find(r)]++) ok = false;
    }
    if (ok) ++count;
  } while (std::prev_permutation(sel.begin(), sel.end()));
  return count;
}

BigCount count_total(long N, long M) { return binom(binom(N, 3), M); }

namespace {

struct ConnectedMemo {
  std::mutex mu;
  std::map<std::pair<int, int>, BigCount> c, t;

  const BigCount& total(int n, int m) {
    auto key = std::make_pair(n, m);
    auto it = t.find(key);
    if (it == t.end()) it = t.emplace(key, count_total(n, m)).first;
    return it->second;
  }

  BigCount connected(int N, int M) {
    if (M < 0 || N <= 0) return 0;
    if (N == 1) return M == 0 ? 1 : 0;
    if (BigCount(M) > binom(N, 3)) return 0;
    auto key = std::make_pair(N, M);
    if (auto it = c.find(key); it != c.end()) return it->second;
    BigCount s = total(N, M);
    for (int n1 = 1; n1 < N; ++n1) {
      BigCount ways = binom(N - 1, n1 - 1);
      for (int m1 = 0; m1 <= M; ++m1) {
        BigCount cc = connected(n1, m1);
        if (cc == 0) continue;
        const BigCount& rest = total(N - n1, M - m1);
        if (rest == 0) continue;
        s -= ways * cc * rest;
      }
    }
    c.emplace(key, s);
    return s;
  }
};

ConnectedMemo& connected_memo() {
  static ConnectedMemo memo;
  return memo;
}

}  // namespace

BigCount count_connected_exact(int N, int M) {
  if (N < 0 || M < 0) throw DomainError("count_connected_exact: N and M must be nonnegative");
  if (N > 60 || M > 90) throw ResourceError("count_connected_exact: bound N <= 60, M <= 90 exceeded");
  if (N == 0) return 0;
  auto& memo = connected_memo();
  std::lock_guard<std::mutex> lock(memo.mu);
  return memo.connected(N, M);
}

BigCount count_connected_bruteforce(int N, int M) {
  if (N > 6) throw ResourceError("count_connected_bruteforce: N must be at most 6");
  if (N < 0 || M < 0) throw DomainError("count_connected_bruteforce: negative argument");
  std::vector<Mask> tri = triple_masks(N);
  int T = static_cast<int>(tri.size());
  if (M > T) return 0;
  long count = 0;
  std::vector<Mask> chosen;
  for (std::uint32_t s = 0; s < (1u << T); ++s) {
    if (std::popcount(s) != M) continue;
    chosen.clear();
    for (int i = 0; i < T; ++i)
      if (s >> i & 1u) chosen.push_back(tri[i]);
    if (masks_connected(chosen.data(), M, N)) ++count;
  }
  return count;
}

PrekernelCensus census_prekernels_bruteforce(int n, int m, int jobs) {
  if (n > 8) throw ResourceError("census_prekernels_bruteforce: n must be at most 8");
  if (n < 0 || m < 0) throw DomainError("census_prekernels_bruteforce: negative argument");
  if (subset_cost(n, m) > 3e8)
    throw ResourceError("census_prekernels_bruteforce: more than 3e8 edge sets");
  PrekernelCensus out;
  out.n = n;
  out.m = m;
  if (n == 0) {
    if (m == 0) {
      out.total = 1;
      out.rows[{0, 0, 0, 0}] = 1;
    }
    return out;
  }
  std::vector<Mask> tri = triple_masks(n);
  int T = static_cast<int>(tri.size());
  if (m == 0 || m > T) return out;
  jobs = std::max(1, jobs);
  std::vector<std::map<PreKey, std::uint64_t>> partial(static_cast<std::size_t>(jobs));
  run_partitioned(T, jobs, [&](int job, int first) {
    auto& rows = partial[job];
    for_each_subset(tri, n, m, first, [&](const Mask* es, const std::vector<int>& deg) {
      Mask low = 0, one = 0;
      for (int v = 0; v < n; ++v) {
        if (deg[v] == 0) return;
        if (deg[v] == 1) one |= 1u << v;
        if (deg[v] >= 3) low |= 1u << v;
      }
      bool all_two_edges = true;
      for (int i = 0; i < m; ++i) {
        int leaves = std::popcount(es[i] & one);
        if (leaves > 1) return;
        if (leaves == 0) all_two_edges = false;
      }
      if (all_two_edges && low == 0) return;  // a single isolated cycle
      if (!masks_connected(es, m, n)) return;
      PreKey key{std::popcount(one), 0, 0, 0};
      for (int v = 0; v < n; ++v) {
        if (deg[v] != 2) continue;
        int threes = 0;
        for (int i = 0; i < m; ++i)
          if ((es[i] >> v & 1u) && !(es[i] & one)) ++threes;
        (threes == 0 ? key.k0 : threes == 1 ? key.k1 : key.k2)++;
      }
      ++rows[key];
    });
  });
  for (const auto& rows : partial)
    for (const auto& [key, c] : rows) {
      out.rows[key] += c;
      out.total += c;
    }
  return out;
}

std::string census_csv(const PrekernelCensus& c) {
  std::ostringstream os;
  os << "n,m,nu1,k0,k1,k2,count\n";
  for (const auto& [key, count] : c.rows)
    os << c.n << ',' << c.m << ',' << key.nu1 << ',' << key.k0 << ',' << key.k1 << ',' << key.k2
       << ',' << count << '\n';
  return os.str();
}

CoreCensus census_cores_bruteforce(int n, int m) {
  if (n > 8) throw ResourceError("census_cores_bruteforce: n must be at most 8");
  if (subset_cost(n, m) > 3e8) throw ResourceError("census_cores_bruteforce: more than 3e8 edge sets");
  CoreCensus out;
  out.n = n;
  out.m = m;
  if (n == 0) {
    if (m == 0) out.total = 1;
    return out;
  }
  std::vector<Mask> tri = triple_masks(n);
  int T = static_cast<int>(tri.size());
  if (m == 0 || m > T) return out;
  std::map<std::pair<int, std::vector<int>>, std::uint64_t> rows;
  for (int first = 0; first < T; ++first)
    for_each_subset(tri, n, m, first, [&](const Mask* es, const std::vector<int>& deg) {
      Mask one = 0;
      std::vector<int> heavy;
      for (int v = 0; v < n; ++v) {
        if (deg[v] == 0) return;
        if (deg[v] == 1)
          one |= 1u << v;
        else
          heavy.push_back(deg[v]);
      }
      for (int i = 0; i < m; ++i)
        if (std::popcount(es[i] & one) > 1) return;
      ++rows[{std::popcount(one), heavy}];
    });
  for (const auto& [key, c] : rows) {
    out.rows[key] = c;
    out.total += c;
  }
  return out;
}

std::string variant_name(DecompositionVariant v) {
  switch (v) {
    case DecompositionVariant::WithBinom: return "with_binom";
    case DecompositionVariant::WithoutBinom: return "without_binom";
    case DecompositionVariant::Both: return "both";
    case DecompositionVariant::Neither: return "neither";
  }
  return "?";
}

DecompositionReport check_decomposition(int N, int M, int jobs) {
  if (N > 8) throw ResourceError("check_decomposition: N must be at most 8");
  if (N < 1 || M < 0) throw DomainError("check_decomposition: need N >= 1, M >= 0");
  DecompositionReport r;
  r.N = N;
  r.M = M;
  r.lhs = count_connected_exact(N, M);
  for (int n = 1; n <= N; ++n) {
    if ((N - n) % 2) continue;
    int m = M - (N - n) / 2;
    if (m < 0) continue;
    BigCount g = census_prekernels_bruteforce(n, m, jobs).total;
    if (g == 0) continue;
    BigCount forests = count_forests(N, n, 3);
    r.rhs_without_binom += forests * g;
    r.rhs_with_binom += binom(N, n) * forests * g;
  }
  bool w = r.lhs == r.rhs_with_binom, wo = r.lhs == r.rhs_without_binom;
  r.holds = w && wo ? DecompositionVariant::Both
            : w     ? DecompositionVariant::WithBinom
            : wo    ? DecompositionVariant::WithoutBinom
                    : DecompositionVariant::Neither;
  return r;
}

namespace {

void check_kernel_args(int k1, int k2, int n3, const std::vector<int>& d, int m3, int m2prime) {
  if (k1 < 0 || k2 < 0 || n3 < 0 || m3 < 0 || m2prime < 0)
    throw DomainError("kernel configurations: negative parameter");
  if (static_cast<int>(d.size()) != n3) throw DomainError("kernel configurations: |d| must equal n3");
  for (int x : d)
    if (x < 3) throw DomainError("kernel configurations: degrees must be at least 3");
  long T3 = 3L * m3 - k1 - 2L * k2, T2 = 2L * m2prime - k1;
  if (T3 < 0) throw DomainError("kernel configurations: T3 < 0");
  if (T2 < 0) throw DomainError("kernel configurations: T2 < 0");
  long Q3 = std::accumulate(d.begin(), d.end(), 0L);
  if (Q3 != T3 + T2) throw DomainError("kernel configurations: point counts do not balance");
}

}  // namespace

KernelConfigCount count_kernel_configurations(int k1, int k2, int n3, const std::vector<int>& d,
                                              int m3, int m2prime) {
  check_kernel_args(k1, k2, n3, d, m3, m2prime);
  long P3 = 3L * m3, P2 = 2L * m2prime, T3 = P3 - k1 - 2L * k2, T2 = P2 - k1;
  long Q3 = std::accumulate(d.begin(), d.end(), 0L);
  KernelConfigCount out;
  BigCount num = factorial(k1 + k2 + n3) * factorial(P3) * factorial(P2) * factorial(Q3) * pow_big(2, k1);
  BigCount den = factorial(n3) * factorial(k1) * factorial(k2) * factorial(T3) * factorial(T2);
  out.configurations = num / den;
  out.multiplicity = pow_big(2, k1 + k2);
  for (int x : d) out.multiplicity *= factorial(x);
  return out;
}

KernelConfigEnumeration enumerate_kernel_configurations(int k1, int k2, int n3,
                                                        const std::vector<int>& d, int m3,
                                                        int m2prime) {
  check_kernel_args(k1, k2, n3, d, m3, m2prime);
  int K = k1 + k2 + n3;
  long Q3 = std::accumulate(d.begin(), d.end(), 0L);
  long points = Q3 + 2L * (k1 + k2);
  if (points > 10) throw ResourceError("enumerate_kernel_configurations: more than 10 points");
  int P3 = 3 * m3;
  std::map<std::vector<int>, long> kernels;
  long total = 0;
  std::vector<int> role(static_cast<std::size_t>(K), 0);
  std::fill(role.begin(), role.begin() + n3, 1);  // 1 marks a vertex of degree >= 3
  do {
    std::vector<int> owner;  // vertex of each vertex point
    std::vector<int> is_two;
    int di = 0;
    for (int v = 0; v < K; ++v) {
      int deg = role[v] ? d[di++] : 2;
      for (int j = 0; j < deg; ++j) owner.push_back(v);
      is_two.push_back(!role[v]);
    }
    std::vector<int> perm(static_cast<std::size_t>(points));
    std::iota(perm.begin(), perm.end(), 0);  // perm[edge point] = vertex point
    do {
      std::vector<int> in_two_edges(static_cast<std::size_t>(K), 0);
      for (int e = P3; e < points; ++e) ++in_two_edges[owner[perm[e]]];
      int ones = 0;
      bool ok = true;
      for (int v = 0; v < K && ok; ++v) {
        if (!is_two[v]) continue;
        if (in_two_edges[v] > 1) ok = false;
        ones += in_two_edges[v];
      }
      if (!ok || ones != k1) continue;
      ++total;
      std::vector<int> phi(static_cast<std::size_t>(points));
      for (int e = 0; e < points; ++e) phi[e] = owner[perm[e]];
      ++kernels[phi];
    } while (std::next_permutation(perm.begin(), perm.end()));
  } while (std::prev_permutation(role.begin(), role.end()));
  KernelConfigEnumeration out;
  out.configurations = total;
  out.kernels = static_cast<long>(kernels.size());
  BigCount mult = count_kernel_configurations(k1, k2, n3, d, m3, m2prime).multiplicity;
  out.uniform_multiplicity = std::all_of(kernels.begin(), kernels.end(),
                                         [&](const auto& kv) { return BigCount(kv.second) == mult; });
  return out;
}

Weight w_core(long n, long m, long nu1) {
  long lo = std::max(0L, 2 * n - 3 * m), hi = std::min(n, m);
  if (nu1 < lo || nu1 > hi)
    throw DomainError("w_core: nu1 outside J_m = [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  long n2 = n - nu1, m3 = m - nu1, Q2 = 3 * m - nu1;
  Weight w;
  w.boundary = nu1 == 2 * n - 3 * m;
  double base = lfact(n) + lfact(Q2) - lfact(n2) - lfact(nu1) - lfact(m3) - m3 * std::log(6.0);
  if (w.boundary) {
    w.log_value = base - n * std::log(2.0);
  } else if (n2 == 0) {
    w.log_value = Q2 == 0 ? base - nu1 * std::log(2.0) : -INFINITY;
  } else {
    w.lambda = solve_tpo_mean(2, static_cast<double>(Q2) / n2).lambda;
    w.log_value = base - nu1 * std::log(2.0) + n2 * std::log(f_k(2, w.lambda)) - Q2 * std::log(w.lambda);
  }
  w.value = std::exp(w.log_value);
  if (n <= 170 && m <= 170) {
    BigCount num = factorial(n) * factorial(Q2);
    BigCount den = factorial(n2) * factorial(nu1) * factorial(m3) * pow_big(2, w.boundary ? n : nu1) *
                   pow_big(6, m3);
    w.exact = std::make_pair(num, den);
  }
  return w;
}

PreDerived pre_derived(long n, long m, const PreX& x) {
  PreDerived d{};
  d.n2eq = x.k0 + x.k1 + x.k2;
  d.n3 = n - x.nu1 - d.n2eq;
  d.m2 = x.nu1;
  d.m2p = x.nu1 - x.k0;
  d.P2 = 2 * d.m2p;
  d.m3 = m - x.nu1;
  d.P3 = 3 * d.m3;
  d.Q3 = 3 * m - x.nu1 - 2 * d.n2eq;
  d.T3 = d.P3 - x.k1 - 2 * x.k2;
  d.T2 = d.P2 - x.k1;
  return d;
}

void check_region(long n, long m, const PreX& x) {
  PreDerived d = pre_derived(n, m, x);
  auto in = [n](long v) { return v >= 0 && v <= n; };
  if (!in(x.nu1) || !in(x.k0) || !in(x.k1) || !in(x.k2) || d.m3 < 0 || d.m2p < 0)
    throw RegionError("C1", "coordinates must lie in [0, n] with m3, m2' >= 0");
  if (d.T2 < 0) throw RegionError("C2", "T2 = " + std::to_string(d.T2) + " < 0");
  if (d.T3 < 0) throw RegionError("C3", "T3 = " + std::to_string(d.T3) + " < 0");
  if (d.n3 < 0 || d.Q3 < 3 * d.n3)
    throw RegionError("C4", "need Q3 >= 3 n3 >= 0 (Q3 = " + std::to_string(d.Q3) +
                                ", n3 = " + std::to_string(d.n3) + ")");
  if (d.n3 == 0 && d.Q3 != 0) throw RegionError("C5", "Q3 = " + std::to_string(d.Q3) + " with n3 = 0");
}

bool in_region(long n, long m, const PreX& x) {
  PreDerived d = pre_derived(n, m, x);
  auto in = [n](long v) { return v >= 0 && v <= n; };
  return in(x.nu1) && in(x.k0) && in(x.k1) && in(x.k2) && d.m3 >= 0 && d.m2p >= 0 && d.T2 >= 0 &&
         d.T3 >= 0 && d.n3 >= 0 && d.Q3 >= 3 * d.n3 && (d.n3 > 0 || d.Q3 == 0);
}

Weight w_pre(long n, long m, const PreX& x) {
  check_region(n, m, x);
  PreDerived d = pre_derived(n, m, x);
  Weight w;
  w.boundary = d.Q3 == 3 * d.n3;
  double log_rising = x.k0 == 0 ? 0.0 : d.m2p == 0 ? -INFINITY : std::lgamma(double(d.m2p + x.k0)) - std::lgamma(double(d.m2p));
  double base = lfact(d.P3) + lfact(d.P2) + lfact(d.Q3) + log_rising - lfact(x.k0) - lfact(x.k1) -
                lfact(x.k2) - lfact(d.n3) - lfact(d.m3) - lfact(d.T3) - lfact(d.T2) - lfact(d.m2p) -
                (x.k2 + d.m2p) * std::log(2.0) - d.m3 * std::log(6.0);
  if (w.boundary) {
    w.log_value = base - d.n3 * std::log(6.0);
  } else {
    w.lambda = solve_tpo_mean(3, static_cast<double>(d.Q3) / d.n3).lambda;
    w.log_value = base + d.n3 * std::log(f_k(3, w.lambda)) - d.Q3 * std::log(w.lambda);
  }
  w.value = std::exp(w.log_value);
  if (n <= 170 && m <= 170) {
    BigCount rising = 1;
    for (long i = 0; i < x.k0; ++i) rising *= d.m2p + i;
    BigCount num = factorial(d.P3) * factorial(d.P2) * factorial(d.Q3) * rising;
    BigCount den = factorial(x.k0) * factorial(x.k1) * factorial(x.k2) * factorial(d.n3) *
                   factorial(d.m3) * factorial(d.T3) * factorial(d.T2) * factorial(d.m2p) *
                   pow_big(2, x.k2 + d.m2p) * pow_big(6, d.m3) * (w.boundary ? pow_big(6, d.n3) : BigCount(1));
    w.exact = std::make_pair(num, den);
  }
  return w;
}

}  // namespace hypercount
