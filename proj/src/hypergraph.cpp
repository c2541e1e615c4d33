#include "hypercount/hypergraph.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "hypercount/errors.hpp"

namespace hypercount {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

template <class Edges>
bool all_joined(int n, const Edges& edges) {
  if (n <= 1) return true;
  UnionFind uf(n);
  for (const auto& e : edges)
    for (std::size_t i = 1; i < e.size(); ++i) uf.unite(e[0], e[i]);
  int root = uf.find(0);
  for (int v = 1; v < n; ++v)
    if (uf.find(v) != root) return false;
  return true;
}

Triple sorted(Triple t) {
  std::sort(t.begin(), t.end());
  return t;
}

}  // namespace

Hypergraph Hypergraph::make(int n, std::vector<Triple> edges) {
  if (n < 0) throw DomainError("hypergraph: negative vertex count");
  for (auto& e : edges) {
    e = sorted(e);
    if (e[0] < 0 || e[2] >= n) throw DomainError("hypergraph: vertex id out of range");
    if (e[0] == e[1] || e[1] == e[2]) throw DomainError("hypergraph: edge with repeated vertex");
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
    throw DomainError("hypergraph: duplicate edge");
  Hypergraph g;
  g.n = n;
  g.edges = std::move(edges);
  return g;
}

std::vector<int> degrees(const Hypergraph& g) {
  std::vector<int> d(static_cast<std::size_t>(g.n), 0);
  for (const auto& e : g.edges)
    for (int v : e) ++d[v];
  return d;
}

bool is_connected(const Hypergraph& g) { return all_joined(g.n, g.edges); }
bool is_connected(const Multigraph& g) { return all_joined(g.n, g.phi); }

CoreDecomposition peel_core(const Hypergraph& g) {
  std::vector<int> deg = degrees(g);
  std::vector<std::vector<int>> inc(static_cast<std::size_t>(g.n));
  for (int i = 0; i < g.m(); ++i)
    for (int v : g.edges[i]) inc[v].push_back(i);
  std::vector<char> alive(static_cast<std::size_t>(g.m()), 1);
  std::deque<int> queue(static_cast<std::size_t>(g.m()));
  std::iota(queue.begin(), queue.end(), 0);
  auto violates = [&](int i) {
    int heavy = 0;
    for (int v : g.edges[i]) heavy += deg[v] >= 2;
    return heavy < 2;
  };
  while (!queue.empty()) {
    int i = queue.front();
    queue.pop_front();
    if (!alive[i] || !violates(i)) continue;
    alive[i] = 0;
    for (int v : g.edges[i]) {
      --deg[v];
      for (int j : inc[v])
        if (alive[j]) queue.push_back(j);
    }
  }
  CoreDecomposition d;
  for (int i = 0; i < g.m(); ++i) (alive[i] ? d.core_edges : d.forest_edges).push_back(g.edges[i]);
  for (int v = 0; v < g.n; ++v)
    if (deg[v] > 0) d.core_vertices.push_back(v);
  d.roots = d.core_vertices;
  return d;
}

bool is_core(const Hypergraph& g) {
  CoreDecomposition d = peel_core(g);
  return d.forest_edges.empty() && static_cast<int>(d.core_vertices.size()) == g.n;
}

bool is_prekernel(const Hypergraph& g) {
  if (!is_core(g)) return false;
  std::vector<int> deg = degrees(g);
  UnionFind uf(g.n);
  for (const auto& e : g.edges) {
    uf.unite(e[0], e[1]);
    uf.unite(e[0], e[2]);
  }
  // A component is an isolated cycle iff all its edges are 2-edges and its
  // remaining vertices all have degree exactly 2.
  std::map<int, bool> cycle_like;
  for (const auto& e : g.edges) {
    int leaves = 0;
    for (int v : e) leaves += deg[v] == 1;
    auto [it, fresh] = cycle_like.emplace(uf.find(e[0]), true);
    (void)fresh;
    if (leaves != 1) it->second = false;
  }
  for (int v = 0; v < g.n; ++v)
    if (deg[v] >= 3) cycle_like[uf.find(v)] = false;
  for (const auto& [root, cyc] : cycle_like)
    if (cyc) return false;
  return true;
}

PrekernelParams prekernel_params(const Hypergraph& g) {
  if (!is_core(g)) throw DomainError("prekernel_params: graph is not a core");
  std::vector<int> deg = degrees(g);
  std::vector<int> three_edges(static_cast<std::size_t>(g.n), 0);
  for (const auto& e : g.edges) {
    bool is3 = deg[e[0]] > 1 && deg[e[1]] > 1 && deg[e[2]] > 1;
    if (is3)
      for (int v : e) ++three_edges[v];
  }
  PrekernelParams p;
  for (int v = 0; v < g.n; ++v) {
    if (deg[v] == 1) {
      ++p.nu1;
    } else if (deg[v] == 2) {
      int t = three_edges[v];
      (t == 0 ? p.k0 : t == 1 ? p.k1 : p.k2)++;
    } else {
      p.degrees3.push_back(deg[v]);
    }
  }
  return p;
}

KernelTrace extract_kernel(const Hypergraph& g) {
  if (!is_prekernel(g)) throw DomainError("extract_kernel: input is not a pre-kernel");
  std::vector<int> deg = degrees(g);
  KernelTrace t;
  t.kernel.n = g.n;
  std::vector<Pair> pairs;
  std::vector<int> pair_count(static_cast<std::size_t>(g.n), 0);
  for (const auto& e : g.edges) {
    std::vector<int> heavy;
    for (int v : e) {
      if (deg[v] == 1)
        t.leaves.push_back(v);
      else
        heavy.push_back(v);
    }
    if (heavy.size() == 3) {
      t.kernel.edges3.push_back(e);
    } else {
      pairs.push_back({heavy[0], heavy[1]});
      ++pair_count[heavy[0]];
      ++pair_count[heavy[1]];
    }
  }
  std::sort(t.leaves.begin(), t.leaves.end());
  auto contracted = [&](int v) { return deg[v] == 2 && pair_count[v] == 2; };
  std::vector<std::vector<int>> inc(static_cast<std::size_t>(g.n));
  for (int i = 0; i < static_cast<int>(pairs.size()); ++i) {
    inc[pairs[i][0]].push_back(i);
    inc[pairs[i][1]].push_back(i);
  }
  std::vector<char> used(pairs.size(), 0);
  for (int u = 0; u < g.n; ++u) {
    if (deg[u] < 2 || contracted(u)) continue;
    t.kernel.vertices.push_back(u);
    for (int start : inc[u]) {
      if (used[start]) continue;
      used[start] = 1;
      int cur = pairs[start][0] == u ? pairs[start][1] : pairs[start][0];
      std::vector<int> chain;
      while (contracted(cur)) {
        chain.push_back(cur);
        int nxt = -1;
        for (int j : inc[cur])
          if (!used[j]) nxt = j;
        used[nxt] = 1;
        cur = pairs[nxt][0] == cur ? pairs[nxt][1] : pairs[nxt][0];
      }
      t.kernel.edges2.push_back({u, cur});
      t.chains.push_back(std::move(chain));
    }
  }
  return t;
}

Hypergraph rebuild_prekernel(const KernelTrace& t) {
  std::vector<Triple> edges = t.kernel.edges3;
  std::size_t next_leaf = 0;
  for (std::size_t i = 0; i < t.kernel.edges2.size(); ++i) {
    std::vector<int> path{t.kernel.edges2[i][0]};
    path.insert(path.end(), t.chains[i].begin(), t.chains[i].end());
    path.push_back(t.kernel.edges2[i][1]);
    for (std::size_t j = 0; j + 1 < path.size(); ++j) {
      if (next_leaf >= t.leaves.size()) throw DomainError("rebuild_prekernel: too few leaves");
      edges.push_back({path[j], path[j + 1], t.leaves[next_leaf++]});
    }
  }
  if (next_leaf != t.leaves.size()) throw DomainError("rebuild_prekernel: unused leaves");
  return Hypergraph::make(t.kernel.n, std::move(edges));
}

std::vector<int> kernel_degrees(const Kernel& k) {
  std::vector<int> d(static_cast<std::size_t>(k.n), 0);
  for (const auto& e : k.edges2)
    for (int v : e) ++d[v];
  for (const auto& e : k.edges3)
    for (int v : e) ++d[v];
  return d;
}

bool is_simple(const Multigraph& mg) {
  std::vector<Triple> rows;
  rows.reserve(mg.phi.size());
  for (const auto& r : mg.phi) {
    Triple s = sorted(r);
    if (s[0] == s[1] || s[1] == s[2]) return false;
    rows.push_back(s);
  }
  std::sort(rows.begin(), rows.end());
  return std::adjacent_find(rows.begin(), rows.end()) == rows.end();
}

Hypergraph multigraph_to_hypergraph(const Multigraph& mg) {
  if (!is_simple(mg)) throw DomainError("multigraph_to_hypergraph: multigraph is not simple");
  return Hypergraph::make(mg.n, mg.phi);
}

Hypergraph read_hypergraph(std::istream& in) {
  long n = -1, m = -1;
  if (!(in >> n >> m) || n < 0 || m < 0) throw DomainError("fixture: expected header \"n m\"");
  std::vector<Triple> edges;
  for (long i = 0; i < m; ++i) {
    Triple e{};
    if (!(in >> e[0] >> e[1] >> e[2])) throw DomainError("fixture: truncated edge list");
    for (int& v : e) {
      if (v < 1 || v > n) throw DomainError("fixture: vertex id out of range");
      --v;
    }
    edges.push_back(e);
  }
  return Hypergraph::make(static_cast<int>(n), std::move(edges));
}

void write_hypergraph(std::ostream& out, const Hypergraph& g) {
  out << g.n << ' ' << g.m() << '\n';
  for (const auto& e : g.edges) out << e[0] + 1 << ' ' << e[1] + 1 << ' ' << e[2] + 1 << '\n';
}

void write_multigraph(std::ostream& out, const Multigraph& g) {
  out << g.n << ' ' << g.m() << '\n';
  for (const auto& e : g.phi) out << e[0] + 1 << ' ' << e[1] + 1 << ' ' << e[2] + 1 << '\n';
}

std::string to_text(const Hypergraph& g) {
  std::ostringstream os;
  write_hypergraph(os, g);
  return os.str();
}

}  // namespace hypercount
