#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace hypercount {

using Triple = std::array<int, 3>;
using Pair = std::array<int, 2>;

// Simple 3-uniform hypergraph on vertices 0..n-1. Edges are sorted triples kept in
// lexicographic order, so two hypergraphs are equal iff their edge lists are.
struct Hypergraph {
  int n = 0;
  std::vector<Triple> edges;

  // Validates and canonicalises; rejects repeated vertices and duplicate triples.
  static Hypergraph make(int n, std::vector<Triple> edges);
  int m() const { return static_cast<int>(edges.size()); }
  bool operator==(const Hypergraph&) const = default;
};

// Configuration-model output: edge i has points phi[i][0..2], loops and repeats allowed.
struct Multigraph {
  int n = 0;
  std::vector<Triple> phi;
  int m() const { return static_cast<int>(phi.size()); }
};

struct CoreDecomposition {
  std::vector<int> core_vertices;
  std::vector<Triple> core_edges;
  std::vector<Triple> forest_edges;
  std::vector<int> roots;  // same set as core_vertices
};

// Multigraph with edges of size 2 and 3 obtained by contracting a pre-kernel.
struct Kernel {
  int n = 0;  // label range of the host graph
  std::vector<int> vertices;
  std::vector<Pair> edges2;
  std::vector<Triple> edges3;
};

// What extract_kernel removed, enough to rebuild the pre-kernel.
struct KernelTrace {
  Kernel kernel;
  std::vector<std::vector<int>> chains;  // degree-2 vertices contracted into edges2[i], in order
  std::vector<int> leaves;               // degree-1 vertices, ascending
};

struct PrekernelParams {
  int nu1 = 0, k0 = 0, k1 = 0, k2 = 0;
  std::vector<int> degrees3;  // degrees of the vertices of degree >= 3, by ascending vertex id
  bool operator==(const PrekernelParams&) const = default;
};

std::vector<int> degrees(const Hypergraph& g);

bool is_connected(const Hypergraph& g);
bool is_connected(const Multigraph& g);

CoreDecomposition peel_core(const Hypergraph& g);
bool is_core(const Hypergraph& g);
bool is_prekernel(const Hypergraph& g);
// Classification of degree-1 and degree-2 vertices of a core.
PrekernelParams prekernel_params(const Hypergraph& g);

KernelTrace extract_kernel(const Hypergraph& g);
// Splits the kernel's 2-edges back along the recorded chains and re-attaches the
// degree-1 vertices in ascending order.
Hypergraph rebuild_prekernel(const KernelTrace& t);
std::vector<int> kernel_degrees(const Kernel& k);  // indexed by vertex label

bool is_simple(const Multigraph& mg);
Hypergraph multigraph_to_hypergraph(const Multigraph& mg);

// Text fixture format: "n m" then m lines of three 1-based vertex ids.
Hypergraph read_hypergraph(std::istream& in);
void write_hypergraph(std::ostream& out, const Hypergraph& g);
void write_multigraph(std::ostream& out, const Multigraph& g);
std::string to_text(const Hypergraph& g);

}  // namespace hypercount
