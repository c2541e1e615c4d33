#pragma once

#include <cstdint>
#include <vector>

#include "hypercount/exact_enum.hpp"
#include "hypercount/hypergraph.hpp"
#include "hypercount/rng.hpp"

namespace hypercount {

// ---- cores ----------------------------------------------------------------

struct GcoreSample {
  Multigraph graph;
  // config[p] = vertex point matched to edge point p (edge e owns points 3e..3e+2).
  // Vertex points are numbered vertex by vertex, ascending.
  std::vector<int> config;
};
// d lists the degrees (>= 2) of the n - nu1 vertices outside V1, in ascending vertex order.
GcoreSample sample_gcore(int n, int m, int nu1, const std::vector<int>& d, Rng& rng);
// binom(n,nu1) binom(m,nu1) 3^nu1 nu1! Q2!
BigCount gcore_configuration_count(int n, int m, int nu1);

// ---- kernels --------------------------------------------------------------

struct KernelSample {
  Kernel kernel;
  // Vertex of every edge point: the m3 3-edges first, then the 2-edges.
  std::vector<int> phi;
};
// Kernel on the labels V with m3 3-edges, k1 + k2 degree-2 vertices and the
// degrees d of the remaining vertices (assigned to them in ascending order).
// The number of 2-edges follows from the point balance.
KernelSample sample_kernel(const std::vector<int>& V, int m3, int k1, int k2, const std::vector<int>& d,
                           Rng& rng);
// Share of 2-edges with exactly one endpoint of kernel degree 2.
double fraction_two_edges_one_deg2(const Kernel& k);

// ---- pre-kernels ----------------------------------------------------------

Multigraph sample_prekernel(int n, int m, const PreX& x, const std::vector<int>& d, Rng& rng);

struct McCount {
  long trials = 0;
  long successes = 0;
};

// Simple-and-connected frequency of Gpre(x, Y) with Y conditioned on its sum;
// trials are split into fixed chunks with their own streams, so results do not
// depend on jobs.
McCount prekernel_success(int n, int m, const PreX& x, long trials, const Rng& rng, int jobs = 1);

struct GpreTerm {
  PreX x;
  double weight = 0;  // n! w_pre(x) P(Sigma)
  long trials = 0, successes = 0;
};

struct GpreEstimate {
  double value = 0;
  double stderr_ = 0;
  double log_value = 0;
  long trials = 0;
  std::vector<GpreTerm> terms;
};
// Sums weight * success rate over every lattice point of the region, with
// trials allocated in proportion to weight (at least min_per_point each).
GpreEstimate estimate_gpre(int n, int m, const Rng& rng, long trials, int jobs = 1,
                           long min_per_point = 200);

// Integer point near n x* with the largest pre-kernel weight.
PreX lattice_optimum(int n, int m);

struct TrendPoint {
  int n = 0, m = 0;
  PreX x;
  long trials = 0;
  double p_simple = 0, p_connected = 0;
};
TrendPoint prekernel_trend_point(int n, int m, long trials, const Rng& rng, int jobs = 1);
// n in {50, 100, 200} with m = n/2 + ceil(n^0.8), so r falls as n grows.
std::vector<std::pair<int, int>> trend_schedule();

// ---- left/right bin model -------------------------------------------------

struct BinModel {
  std::vector<int> ts, ts2;  // left and right bin sizes, each in {3,4,5}
  long L = 0, L2 = 0;        // connectors on each side
  long K() const;
};
void check_bin_model(const BinModel& b);
bool sample_bin_model(const BinModel& b, Rng& rng);
// N all-3 bins on each side, L = (3N - K)/2 connectors. Default N = K, so
// every bin carries on average one across-edge.
BinModel bin_model_for_K(long K, long bins = -1);
// Smallest N with 3N >= K and 3N - K even (every point across, up to parity).
long min_bins_for_K(long K);
McCount bin_model_connectivity(const BinModel& b, long trials, const Rng& rng, int jobs = 1);

}  // namespace hypercount
