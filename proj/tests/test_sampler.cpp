#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "hypercount/errors.hpp"
#include "hypercount/exact_enum.hpp"
#include "hypercount/hypergraph.hpp"
#include "hypercount/sampler.hpp"
#include "hypercount/solvers.hpp"
#include "hypercount/tpoisson.hpp"

using namespace hypercount;

namespace {

std::vector<int> point_degrees(const Multigraph& g) {
  std::vector<int> d(static_cast<std::size_t>(g.n), 0);
  for (const auto& e : g.phi)
    for (int v : e) ++d[v];
  return d;
}

// p-value of the chi-square statistic against equal cell frequencies
double uniform_p(const std::map<std::string, long>& freq, long cells, long draws) {
  double e = static_cast<double>(draws) / cells, chi = 0;
  for (const auto& [k, c] : freq) chi += (c - e) * (c - e) / e;
  chi += (cells - static_cast<long>(freq.size())) * e;
  boost::math::chi_squared dist(static_cast<double>(cells - 1));
  return boost::math::cdf(boost::math::complement(dist, chi));
}

// V1 is recoverable from the degrees, the rest of the configuration is the matching
std::string config_key(const GcoreSample& s) {
  std::string k;
  for (int d : point_degrees(s.graph)) k += std::to_string(d) + ",";
  k += "|";
  for (int c : s.config) k += std::to_string(c) + ",";
  return k;
}

std::string kernel_key(const Kernel& k) {
  std::string s;
  for (const auto& e : k.edges3) s += std::to_string(e[0]) + std::to_string(e[1]) + std::to_string(e[2]) + ";";
  s += "|";
  for (const auto& e : k.edges2) s += std::to_string(e[0]) + std::to_string(e[1]) + ";";
  return s;
}

}  // namespace

TEST_CASE("gcore degree audit") {
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    auto s = sample_gcore(3, 2, 2, {4}, rng);
    auto d = point_degrees(s.graph);
    std::sort(d.begin(), d.end());
    CHECK(d == std::vector<int>{1, 1, 4});
  }
  for (int i = 0; i < 200; ++i) {
    std::vector<int> want = {2, 3, 2, 3, 2, 2, 2, 3, 2, 2, 2, 3};
    auto s = sample_gcore(20, 12, 8, want, rng);
    std::vector<int> rest;
    int ones = 0;
    for (int x : point_degrees(s.graph)) {
      if (x == 1)
        ++ones;
      else
        rest.push_back(x);
    }
    CHECK(ones == 8);
    CHECK(rest == want);
  }
}

TEST_CASE("gcore configurations are uniform") {
  struct Case {
    int n, m, nu1;
    std::vector<int> d;
    long draws;
  };
  for (const Case& c : {Case{2, 1, 1, {2}, 24000}, Case{3, 2, 2, {4}, 400000}}) {
    long cells = static_cast<long>(gcore_configuration_count(c.n, c.m, c.nu1));
    std::map<std::string, long> freq;
    Rng rng(17);
    for (long i = 0; i < c.draws; ++i) ++freq[config_key(sample_gcore(c.n, c.m, c.nu1, c.d, rng))];
    CHECK(static_cast<long>(freq.size()) == cells);
    CHECK(uniform_p(freq, cells, c.draws) > 1e-3);
  }
  CHECK(gcore_configuration_count(3, 2, 2) == 1296);
}

TEST_CASE("gcore simplicity at (20,12,8)") {
  Rng rng(3);
  SigmaEvent ev{12, 28, TruncatedPoisson(2, 1.0)};
  long simple = 0, trials = 4000;
  double loops = 0;
  for (long i = 0; i < trials; ++i) {
    auto y = sample_conditioned(ev, rng);
    std::vector<int> d(y.begin(), y.end());
    auto s = sample_gcore(20, 12, 8, d, rng);
    simple += is_simple(s.graph);
    for (const auto& e : s.graph.phi) loops += e[0] == e[1] || e[1] == e[2] || e[0] == e[2];
  }
  double p = static_cast<double>(simple) / trials;
  MESSAGE("P(simple) " << p << ", mean edges with a repeated vertex " << loops / trials);
  CHECK(p > 0);
  CHECK(p <= 1);
}

TEST_CASE("gcore errors") {
  Rng rng(1);
  CHECK_THROWS_WITH_AS(sample_gcore(5, 2, 3, {3, 3}, rng), "nu1 exceeds m", DomainError);
  CHECK_THROWS_AS(sample_gcore(4, 2, 2, {2, 3}, rng), DomainError);
  CHECK_THROWS_AS(sample_gcore(4, 2, 1, {1, 3, 3}, rng), DomainError);
}

TEST_CASE("kernel: the triple loop") {
  Rng rng(2);
  for (int i = 0; i < 50; ++i) {
    auto s = sample_kernel({4}, 1, 0, 0, {3}, rng);
    REQUIRE(s.kernel.edges3.size() == 1);
    CHECK(s.kernel.edges3[0] == Triple{4, 4, 4});
    CHECK(s.kernel.edges2.empty());
  }
}

TEST_CASE("kernel frequencies follow configuration multiplicities") {
  struct Case {
    int k1, k2;
    std::vector<int> d;
    int m3, m2p;
  };
  for (const Case& c : {Case{1, 0, {3}, 1, 1}, Case{1, 1, {3}, 1, 2}, Case{0, 1, {3, 3}, 2, 1}}) {
    auto e = enumerate_kernel_configurations(c.k1, c.k2, static_cast<int>(c.d.size()), c.d, c.m3, c.m2p);
    REQUIRE(e.uniform_multiplicity);
    long cells = static_cast<long>(e.kernels);
    std::vector<int> V(c.k1 + c.k2 + c.d.size());
    std::iota(V.begin(), V.end(), 0);
    std::map<std::string, long> freq;
    Rng rng(23);
    long draws = 2000 * cells;
    for (long i = 0; i < draws; ++i) ++freq[kernel_key(sample_kernel(V, c.m3, c.k1, c.k2, c.d, rng).kernel)];
    CHECK(static_cast<long>(freq.size()) == cells);
    CHECK(uniform_p(freq, cells, draws) > 1e-3);
  }
}

TEST_CASE("kernel invariants") {
  Rng rng(8);
  std::vector<int> V = {2, 5, 7, 9, 11, 12, 14, 20, 21};
  std::vector<int> d = {3, 3, 4, 5};
  for (int i = 0; i < 500; ++i) {
    auto s = sample_kernel(V, 5, 3, 2, d, rng);
    const Kernel& k = s.kernel;
    CHECK(k.edges3.size() == 5);
    CHECK(k.edges2.size() == 5);
    auto deg = kernel_degrees(k);
    std::vector<int> in3(deg.size(), 0);
    for (const auto& e : k.edges3)
      for (int v : e) ++in3[v];
    int c1 = 0, c2 = 0;
    std::vector<int> big;
    for (int v : V) {
      CHECK(deg[v] >= 2);
      if (deg[v] == 2) {
        CHECK(in3[v] >= 1);
        c1 += in3[v] == 1;
        c2 += in3[v] == 2;
      } else {
        big.push_back(deg[v]);
      }
    }
    CHECK(c1 == 3);
    CHECK(c2 == 2);
    std::sort(big.begin(), big.end());
    CHECK(big == d);
  }
  CHECK_THROWS_AS(sample_kernel({0, 1}, 1, 1, 0, {4}, rng), DomainError);  // unbalanced
  CHECK_THROWS_AS(sample_kernel({0, 1, 2}, 1, 0, 2, {3}, rng), DomainError);  // T3 < 0
}

TEST_CASE("m2' concentration at the pre-kernel optimum") {
  int n = 2000, m = 1100;
  PreX x = lattice_optimum(n, m);
  auto dv = pre_derived(n, m, x);
  REQUIRE(dv.m2p >= 200);
  Rng rng(31);
  double lam = solve_tpo_mean(3, static_cast<double>(dv.Q3) / dv.n3).lambda;
  auto y = sample_conditioned(SigmaEvent{dv.n3, dv.Q3, TruncatedPoisson(3, lam)}, rng);
  std::vector<int> d(y.begin(), y.end());
  std::vector<int> V(static_cast<std::size_t>(dv.n3 + x.k1 + x.k2));
  std::iota(V.begin(), V.end(), 0);
  for (int i = 0; i < 5; ++i) {
    auto s = sample_kernel(V, static_cast<int>(dv.m3), static_cast<int>(x.k1), static_cast<int>(x.k2), d, rng);
    double f = fraction_two_edges_one_deg2(s.kernel);
    CHECK(std::abs(f - 0.5) <= 0.1);
  }
}

TEST_CASE("pre-kernel degree audit") {
  Rng rng(4);
  PreX x{3, 1, 2, 1};
  auto pd = pre_derived(12, 9, x);
  REQUIRE(pd.n3 > 0);
  std::vector<int> d(static_cast<std::size_t>(pd.n3), 3);
  d.back() += static_cast<int>(pd.Q3 - 3 * pd.n3);
  int simple = 0;
  for (int i = 0; i < 3000; ++i) {
    auto g = sample_prekernel(12, 9, x, d, rng);
    CHECK(g.m() == 9);
    if (!is_simple(g)) continue;
    ++simple;
    auto p = prekernel_params(multigraph_to_hypergraph(g));
    CHECK(p.nu1 == 3);
    CHECK(p.k0 == 1);
    CHECK(p.k1 == 2);
    CHECK(p.k2 == 1);
    auto big = p.degrees3;
    std::sort(big.begin(), big.end());
    CHECK(big == d);
  }
  CHECK(simple > 0);
}

TEST_CASE("pre-kernel sampling is deterministic") {
  PreX x{3, 1, 2, 1};
  auto pd = pre_derived(12, 9, x);
  std::vector<int> d(static_cast<std::size_t>(pd.n3), 3);
  d.back() += static_cast<int>(pd.Q3 - 3 * pd.n3);
  Rng a(99), b(99);
  for (int i = 0; i < 20; ++i) CHECK(sample_prekernel(12, 9, x, d, a).phi == sample_prekernel(12, 9, x, d, b).phi);
  auto c1 = prekernel_success(12, 9, x, 5000, Rng(7), 1);
  auto c4 = prekernel_success(12, 9, x, 5000, Rng(7), 4);
  CHECK(c1.successes == c4.successes);
  CHECK(c1.trials == 5000);
}

TEST_CASE("gpre estimate reproduces the census term by term") {
  auto census = census_prekernels_bruteforce(7, 5);
  auto est = estimate_gpre(7, 5, Rng(12), 40000);
  double total = static_cast<double>(census.total);
  CHECK(std::abs(est.value - total) <= 3 * est.stderr_);
  for (const auto& t : est.terms) {
    auto it = census.rows.find(PreKey{t.x.nu1, t.x.k0, t.x.k1, t.x.k2});
    double row = it == census.rows.end() ? 0.0 : static_cast<double>(it->second);
    double p = (t.successes + 0.5) / (t.trials + 1.0);
    double se = t.weight * std::sqrt(p * (1 - p) / t.trials);
    double got = t.weight * t.successes / t.trials;
    CHECK_MESSAGE(std::abs(got - row) <= 4 * se, "x = " << t.x.nu1 << "," << t.x.k0 << "," << t.x.k1 << "," << t.x.k2);
  }
  // every census row has a lattice term
  for (const auto& [k, v] : census.rows) {
    bool found = false;
    for (const auto& t : est.terms) found |= t.x.nu1 == k.nu1 && t.x.k0 == k.k0 && t.x.k1 == k.k1 && t.x.k2 == k.k2;
    CHECK(found);
  }
}

TEST_CASE("bin model") {
  Rng rng(6);
  BinModel apart{{3, 3}, {3, 4, 5}, 3, 6};
  CHECK(apart.K() == 0);
  for (int i = 0; i < 100; ++i) CHECK_FALSE(sample_bin_model(apart, rng));
  BinModel single{{3}, {3}, 0, 0};
  for (int i = 0; i < 100; ++i) CHECK(sample_bin_model(single, rng));
  BinModel single4{{5}, {3}, 1, 0};
  CHECK(single4.K() == 3);
  CHECK_THROWS_AS(check_bin_model(BinModel{{3, 3}, {3}, 1, 0}), DomainError);
  CHECK_THROWS_AS(check_bin_model(BinModel{{3, 6}, {5, 4}, 1, 1}), DomainError);

  CHECK(min_bins_for_K(64) == 22);
  auto b = bin_model_for_K(64);
  CHECK(b.ts.size() == 64);
  CHECK(b.K() == 64);
  CHECK_THROWS_AS(bin_model_for_K(64, 21), DomainError);

  double prev = 0;
  for (long K : {4L, 16L, 64L}) {
    auto c = bin_model_connectivity(bin_model_for_K(K), 10000, Rng(1), 1);
    double p = static_cast<double>(c.successes) / c.trials;
    CHECK(p >= prev);
    prev = p;
  }
  CHECK(prev >= 0.99);
}
