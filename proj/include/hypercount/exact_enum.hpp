#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "hypercount/hypergraph.hpp"

namespace hypercount {

using BigCount = boost::multiprecision::cpp_int;

BigCount factorial(long n);
BigCount binom(const BigCount& a, long b);
BigCount binom(long a, long b);

// Rooted forests of k-edges on [N] whose roots are exactly [n].
BigCount count_forests(long N, long n, int k);
BigCount count_forests_bruteforce(int N, int n, int k);

// binom(binom(N,3), M)
BigCount count_total(long N, long M);
// Connected 3-uniform hypergraphs on [N] with M edges (exponential-formula deconvolution).
BigCount count_connected_exact(int N, int M);
BigCount count_connected_bruteforce(int N, int M);

struct PreKey {
  int nu1, k0, k1, k2;
  auto operator<=>(const PreKey&) const = default;
};

struct PrekernelCensus {
  int n = 0, m = 0;
  BigCount total = 0;
  std::map<PreKey, BigCount> rows;
};

// Connected pre-kernels spanning [n] with m edges, by exhaustive search.
PrekernelCensus census_prekernels_bruteforce(int n, int m, int jobs = 1);
std::string census_csv(const PrekernelCensus& c);

struct CoreCensus {
  int n = 0, m = 0;
  BigCount total = 0;
  // (nu1, degree sequence of the vertices of degree >= 2 in ascending vertex order)
  std::map<std::pair<int, std::vector<int>>, BigCount> rows;
};

// All cores spanning [n] with m edges (not necessarily connected).
CoreCensus census_cores_bruteforce(int n, int m);

enum class DecompositionVariant { WithBinom, WithoutBinom, Both, Neither };
std::string variant_name(DecompositionVariant v);

struct DecompositionReport {
  int N = 0, M = 0;
  BigCount lhs, rhs_with_binom, rhs_without_binom;
  DecompositionVariant holds = DecompositionVariant::Neither;
};

// Compares the connected count with sum_n [binom(N,n)] forests(N,n) prekernels(n, M-(N-n)/2).
DecompositionReport check_decomposition(int N, int M, int jobs = 1);

struct KernelConfigCount {
  BigCount configurations;
  BigCount multiplicity;  // configurations per kernel
};

KernelConfigCount count_kernel_configurations(int k1, int k2, int n3, const std::vector<int>& d,
                                              int m3, int m2prime);
// Exhaustive matcher: enumerates every bijection between vertex and edge points.
// Also returns the number of distinct kernels so multiplicity can be audited.
struct KernelConfigEnumeration {
  BigCount configurations;
  BigCount kernels;
  bool uniform_multiplicity = false;
};
KernelConfigEnumeration enumerate_kernel_configurations(int k1, int k2, int n3,
                                                        const std::vector<int>& d, int m3,
                                                        int m2prime);

struct Weight {
  double log_value = 0.0;
  double value = 0.0;  // exp(log_value), may be inf
  double lambda = 0.0;
  bool boundary = false;
  // Exact factorial/power part as numerator/denominator, when every input is <= 170.
  std::optional<std::pair<BigCount, BigCount>> exact;
};

// Core weight n! Q2! f2^{n2} / (n2! nu1! m3! 2^nu1 6^m3 lambda^Q2); nu1 in J_m.
Weight w_core(long n, long m, long nu1);

struct PreX {
  long nu1 = 0, k0 = 0, k1 = 0, k2 = 0;
};

// Derived pre-kernel quantities for integer parameters.
struct PreDerived {
  long n2eq, n3, m2, m2p, P2, m3, P3, Q3, T3, T2;
};
PreDerived pre_derived(long n, long m, const PreX& x);
// Throws RegionError naming the first violated condition C1..C5.
void check_region(long n, long m, const PreX& x);
bool in_region(long n, long m, const PreX& x);

// Pre-kernel weight; lambda from the degree->=3 mean Q3/n3.
Weight w_pre(long n, long m, const PreX& x);

}  // namespace hypercount
