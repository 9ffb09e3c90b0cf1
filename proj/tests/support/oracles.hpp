#pragma once

// Brute-force reference implementations used by the unit and acceptance
// tests. Nothing here calls into dcolor algorithms.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dcolor/graph.hpp"

namespace oracle {

using dcolor::Color;
using dcolor::Edge;
using dcolor::NodeId;

inline int poly_degree(std::uint64_t p) {
  int d = -1;
  for (int i = 0; i < 64; ++i)
    if (p >> i & 1) d = i;
  return d;
}

inline std::uint64_t poly_rem(std::uint64_t a, std::uint64_t b) {
  const int db = poly_degree(b);
  for (int da = poly_degree(a); da >= db; da = poly_degree(a)) a ^= b << (da - db);
  return a;
}

/// Irreducible iff no polynomial of degree 1..deg/2 divides it.
inline bool trial_irreducible(std::uint64_t p) {
  const int d = poly_degree(p);
  if (d < 1) return false;
  for (int k = 1; 2 * k <= d; ++k)
    for (std::uint64_t q = std::uint64_t{1} << k; q < (std::uint64_t{2} << k); ++q)
      if (poly_rem(p, q) == 0) return false;
  return true;
}

inline std::uint64_t smallest_irreducible(int m) {
  for (std::uint64_t p = (std::uint64_t{1} << m) | 1; p < (std::uint64_t{2} << m); p += 2)
    if (trial_irreducible(p)) return p;
  return 0;
}

/// Schoolbook multiplication of field elements, reducing after every shift.
inline std::uint64_t field_mul(std::uint64_t a, std::uint64_t b, std::uint64_t modulus, int m) {
  std::uint64_t acc = 0;
  for (int i = m - 1; i >= 0; --i) {
    acc <<= 1;
    if (acc >> m & 1) acc ^= modulus;
    if (b >> i & 1) acc ^= a;
  }
  return acc;
}

inline std::uint64_t hash(std::uint64_t s1, std::uint64_t s2, std::uint64_t x, std::uint64_t modulus, int m, int b) {
  return (field_mul(s1, x, modulus, m) ^ s2) & ((std::uint64_t{1} << b) - 1);
}

inline int ceil_log2(std::uint64_t x) {
  int k = 0;
  while ((std::uint64_t{1} << k) < x) ++k;
  return k;
}

inline int log_star2(std::uint64_t n) {
  int k = 0;
  double x = static_cast<double>(n);
  while (x > 1.0) {
    x = std::log2(x);
    ++k;
  }
  return k;
}

inline bool prime(std::uint64_t x) {
  if (x < 2) return false;
  for (std::uint64_t f = 2; f * f <= x; ++f)
    if (x % f == 0) return false;
  return true;
}

inline bool pow_at_least(std::uint64_t q, int e, std::uint64_t K) {
  unsigned __int128 v = 1;
  for (int i = 0; i < e; ++i) {
    v *= q;
    if (v >= K) return true;
  }
  return v >= K;
}

/// Minimal q over all d of the smallest prime with q > d*Delta and q^(d+1) >= K.
inline std::pair<std::uint64_t, int> linial_q(std::uint64_t K, std::uint64_t delta) {
  std::uint64_t best_q = 0;
  int best_d = 0;
  const int max_d = delta == 0 ? 1 : 64;
  for (int d = 1; d <= max_d; ++d) {
    if (best_q != 0 && d * delta >= best_q) break;
    std::uint64_t q = d * delta + 1;
    while (!(prime(q) && pow_at_least(q, d + 1, K))) ++q;
    if (best_q == 0 || q < best_q) {
      best_q = q;
      best_d = d;
    }
  }
  return {best_q, best_d};
}

inline std::uint64_t linial_fixpoint(std::uint64_t K, std::uint64_t delta) {
  for (;;) {
    if (K < 2) return K;
    const std::uint64_t next = linial_q(K, delta).first * linial_q(K, delta).first;
    if (next >= K) return K;
    K = next;
  }
}

inline bool proper(const dcolor::Graph& g, const std::vector<Color>& colors) {
  for (const Edge& e : g.edges())
    if (colors[e.u] == colors[e.v]) return false;
  return true;
}

inline bool independent(const dcolor::Graph& g, const std::vector<bool>& in) {
  for (const Edge& e : g.edges())
    if (in[e.u] && in[e.v]) return false;
  return true;
}

inline bool maximal(const dcolor::Graph& g, const std::vector<bool>& in) {
  for (NodeId v = 0; v < g.size(); ++v) {
    if (in[v]) continue;
    bool dominated = false;
    for (NodeId u : g.neighbors(v)) dominated = dominated || in[u];
    if (!dominated) return false;
  }
  return true;
}

/// Direct check of a total list coloring.
inline bool valid_total(const dcolor::ListColoringInstance& inst, const dcolor::PartialColoring& c) {
  const NodeId n = inst.graph.size();
  if (c.assignment.size() != n) return false;
  for (NodeId v = 0; v < n; ++v) {
    if (!c.assignment[v]) return false;
    const auto& L = inst.lists[v];
    if (std::find(L.begin(), L.end(), *c.assignment[v]) == L.end()) return false;
  }
  for (const Edge& e : inst.graph.edges())
    if (*c.assignment[e.u] == *c.assignment[e.v]) return false;
  return true;
}

/// Every valid total list coloring, by backtracking.
inline std::set<std::vector<Color>> all_list_colorings(const dcolor::ListColoringInstance& inst) {
  std::set<std::vector<Color>> out;
  const NodeId n = inst.graph.size();
  std::vector<Color> cur(n);
  std::function<void(NodeId)> go = [&](NodeId v) {
    if (v == n) {
      out.insert(cur);
      return;
    }
    for (Color c : inst.lists[v]) {
      bool ok = true;
      for (NodeId u : inst.graph.neighbors(v))
        if (u < v && cur[u] == c) ok = false;
      if (!ok) continue;
      cur[v] = c;
      go(v + 1);
    }
  };
  go(0);
  return out;
}

/// Random graph on n nodes whose degrees never exceed max_degree.
inline dcolor::Graph random_bounded_graph(NodeId n, std::uint32_t max_degree, double density, std::mt19937_64& rng) {
  std::vector<Edge> edges;
  std::vector<std::uint32_t> deg(n, 0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (deg[u] < max_degree && deg[v] < max_degree && coin(rng) < density) {
        edges.push_back({u, v});
        ++deg[u];
        ++deg[v];
      }
  return dcolor::Graph(n, edges);
}

/// The graphs of the validity suite as generator specs.
inline std::vector<std::string> suite_specs() {
  std::vector<std::string> specs;
  for (int n = 2; n <= 64; ++n) specs.push_back("path," + std::to_string(n));
  for (int n = 3; n <= 64; ++n) specs.push_back("cycle," + std::to_string(n));
  for (int n = 2; n <= 64; ++n) specs.push_back("star," + std::to_string(n));
  for (int n = 2; n <= 16; ++n) specs.push_back("clique," + std::to_string(n));
  specs.push_back("regular,256,8");
  specs.push_back("gnp,200,0.05");
  return specs;
}

}  // namespace oracle
