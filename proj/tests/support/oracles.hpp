#pragma once

// Independent reimplementations and frozen expectations the tests check the
// library against. The algorithms here share no code with the library: a
// scalar RK4 with interval enclosure per axis, closed-form flows, dense GF(2)
// elimination, a path-based invariant-set computation, and a standalone
// simplicial cup-length computation on a 7-vertex torus triangulation.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <set>
#include <vector>

namespace oracle {

// ---------------------------------------------------------------------------
// Independent per-axis RK4 enclosure.

using Fn1 = double (*)(double);

inline double f_expand(double x) { return x; }
inline double f_contract(double x) { return -x; }
inline double f_msin(double x) { return -std::sin(2.0 * M_PI * x); }
inline double f_psin(double x) { return std::sin(2.0 * M_PI * x); }

inline double rk4(Fn1 f, double tau, double x) {
  double k1 = f(x);
  double k2 = f(x + 0.5 * tau * k1);
  double k3 = f(x + 0.5 * tau * k2);
  double k4 = f(x + tau * k3);
  return x + tau / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
}

struct AxisRow {
  std::vector<int> cells;
  bool ext = false;
};
using AxisTable = std::vector<AxisRow>;

struct AxisSpec {
  double lo, hi;
  int n;
  bool periodic;
};

inline std::vector<int> locate(const AxisSpec& ax, double blo, double bhi, bool& ext) {
  double h = (ax.hi - ax.lo) / ax.n;
  double u = (blo - ax.lo) / h, v = (bhi - ax.lo) / h;
  double ur = std::round(u), vr = std::round(v);
  long long kmin =
      std::abs(u - ur) <= 1e-9 ? static_cast<long long>(ur) : static_cast<long long>(std::floor(u));
  long long kmax = std::abs(v - vr) <= 1e-9 ? static_cast<long long>(vr) - 1
                                            : static_cast<long long>(std::floor(v));
  if (kmax < kmin) kmax = kmin;
  std::vector<int> out;
  if (ax.periodic) {
    if (kmax - kmin + 1 >= ax.n) {
      for (int k = 0; k < ax.n; ++k) out.push_back(k);
      return out;
    }
    std::set<int> seen;
    for (long long k = kmin; k <= kmax; ++k)
      seen.insert(static_cast<int>(((k % ax.n) + ax.n) % ax.n));
    return {seen.begin(), seen.end()};
  }
  if (kmin < 0 || kmax >= ax.n) ext = true;
  for (long long k = std::max(kmin, 0LL); k <= std::min<long long>(kmax, ax.n - 1); ++k)
    out.push_back(static_cast<int>(k));
  return out;
}

// with_mid adds the cell midpoint: on an axis of a 2-D grid the face
// midpoints contribute it, on a 1-D grid they coincide with the endpoints.
inline AxisTable axis_table(Fn1 f, const AxisSpec& ax, double tau, double pad, bool with_mid) {
  AxisTable rows;
  double h = (ax.hi - ax.lo) / ax.n;
  for (int c = 0; c < ax.n; ++c) {
    double clo = ax.lo + h * c, chi = clo + h;
    std::vector<double> pts = {clo, chi};
    if (with_mid) pts.push_back(0.5 * (clo + chi));
    double blo = rk4(f, tau, pts[0]), bhi = blo;
    for (double p : pts) {
      double y = rk4(f, tau, p);
      blo = std::min(blo, y);
      bhi = std::max(bhi, y);
    }
    AxisRow r;
    r.cells = locate(ax, blo - pad, bhi + pad, r.ext);
    rows.push_back(r);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Frozen tables, cross-checked against axis_table in the tests.

inline const AxisTable& circle16_table() {
  static const AxisTable t = {
      {{0, 15}, false},         {{0}, false},           {{0, 1}, false},
      {{0, 1}, false},          {{1, 2}, false},        {{1, 2, 3}, false},
      {{2, 3, 4, 5}, false},    {{4, 5, 6, 7, 8}, false},
      {{7, 8, 9, 10, 11}, false}, {{10, 11, 12, 13}, false},
      {{12, 13, 14}, false},    {{13, 14}, false},      {{14, 15}, false},
      {{14, 15}, false},        {{15}, false},          {{0, 15}, false}};
  return t;
}

inline const AxisTable& circle8_table() {
  static const AxisTable t = {{{0, 7}, false},  {{0}, false},     {{0, 1}, false},
                              {{1, 2, 3, 4}, false}, {{3, 4, 5, 6}, false},
                              {{6, 7}, false},  {{7}, false},     {{0, 7}, false}};
  return t;
}

inline const AxisTable& torus_axis_table() {
  static const AxisTable t = {
      {{0, 1, 2, 3, 15}, false}, {{2, 3, 4, 5}, false}, {{4, 5, 6}, false},
      {{5, 6}, false},           {{6, 7}, false},       {{6, 7}, false},
      {{7}, false},              {{7, 8}, false},       {{7, 8}, false},
      {{8}, false},              {{8, 9}, false},       {{8, 9}, false},
      {{9, 10}, false},          {{9, 10, 11}, false},  {{10, 11, 12, 13}, false},
      {{0, 12, 13, 14, 15}, false}};
  return t;
}

inline const AxisTable& saddle_x_table() {
  static const AxisTable t = {{{}, true},          {{}, true},        {{0, 1}, true},
                              {{1, 2, 3, 4}, false}, {{3, 4, 5, 6}, false},
                              {{6, 7}, true},      {{}, true},        {{}, true}};
  return t;
}

inline const AxisTable& saddle_y_table() {
  static const AxisTable t = {{{2, 3}, false}, {{2, 3}, false}, {{3}, false},
                              {{3, 4}, false}, {{3, 4}, false}, {{4}, false},
                              {{4, 5}, false}, {{4, 5}, false}};
  return t;
}

// ---------------------------------------------------------------------------
// Closed-form flows.

// x' = x and y' = -y decouple; tau-flow multipliers are e^tau and e^-tau.
inline double saddle_exact(double x0, double t) { return x0 * std::exp(t); }
inline double contract_exact(double x0, double t) { return x0 * std::exp(-t); }

// x' = -sin(2 pi x): tan(pi x(t)) = tan(pi x0) e^{-2 pi t} on the branch
// around the attractor at 0. Input and output wrapped to [0, 1).
inline double circle_exact(double x0, double t) {
  double y = x0 - std::floor(x0);
  if (y >= 0.5) y -= 1.0;  // principal branch (-0.5, 0.5]
  if (y == -0.5 || y == 0.5) return 0.5;
  double u = std::tan(M_PI * y) * std::exp(-2.0 * M_PI * t);
  double x = std::atan(u) / M_PI;
  return x < 0 ? x + 1.0 : x;
}

// x' = +sin(2 pi x) is the circle field conjugated by a half turn.
inline double torus_axis_exact(double x0, double t) {
  double z = circle_exact(x0 + 0.5, t) + 0.5;
  return z - std::floor(z);
}

// ---------------------------------------------------------------------------
// Dense GF(2) elimination, independent of the library's packed rows.

inline int dense_rank(std::vector<std::vector<std::uint8_t>> m) {
  if (m.empty()) return 0;
  std::size_t rows = m.size(), cols = m[0].size();
  int rank = 0;
  for (std::size_t c = 0; c < cols && rank < static_cast<int>(rows); ++c) {
    std::size_t piv = rows;
    for (std::size_t r = static_cast<std::size_t>(rank); r < rows; ++r)
      if (m[r][c]) {
        piv = r;
        break;
      }
    if (piv == rows) continue;
    std::swap(m[static_cast<std::size_t>(rank)], m[piv]);
    for (std::size_t r = 0; r < rows; ++r)
      if (r != static_cast<std::size_t>(rank) && m[r][c])
        for (std::size_t k = 0; k < cols; ++k) m[r][k] ^= m[static_cast<std::size_t>(rank)][k];
    ++rank;
  }
  return rank;
}

// ---------------------------------------------------------------------------
// Invariant part by its path characterization: a cell lies on a bi-infinite
// orbit within S iff it reaches a recurrent strongly connected component and
// is reached by one. Kosaraju + breadth-first reach.

inline std::vector<int> invariant_by_paths(
    const std::vector<int>& nodes, const std::function<std::vector<int>(int)>& succ_of) {
  int n = static_cast<int>(nodes.size());
  std::vector<std::vector<int>> adj(nodes.size()), radj(nodes.size());
  auto local = [&nodes](int cell) {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), cell);
    return it != nodes.end() && *it == cell ? static_cast<int>(it - nodes.begin()) : -1;
  };
  for (int i = 0; i < n; ++i)
    for (int cell : succ_of(nodes[static_cast<std::size_t>(i)]))
      if (int j = local(cell); j >= 0) {
        adj[static_cast<std::size_t>(i)].push_back(j);
        radj[static_cast<std::size_t>(j)].push_back(i);
      }

  // Kosaraju pass 1: iterative post-order on the forward graph.
  std::vector<int> order;
  std::vector<std::uint8_t> seen(nodes.size(), 0);
  for (int s = 0; s < n; ++s) {
    if (seen[static_cast<std::size_t>(s)]) continue;
    std::vector<std::pair<int, std::size_t>> stack{{s, 0}};
    seen[static_cast<std::size_t>(s)] = 1;
    while (!stack.empty()) {
      auto& [v, i] = stack.back();
      if (i < adj[static_cast<std::size_t>(v)].size()) {
        int w = adj[static_cast<std::size_t>(v)][i++];
        if (!seen[static_cast<std::size_t>(w)]) {
          seen[static_cast<std::size_t>(w)] = 1;
          stack.push_back({w, 0});
        }
      } else {
        order.push_back(v);
        stack.pop_back();
      }
    }
  }

  // pass 2: reverse graph in reverse post-order.
  std::vector<int> comp(nodes.size(), -1);
  int ncomp = 0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (comp[static_cast<std::size_t>(*it)] >= 0) continue;
    std::vector<int> stack{*it};
    comp[static_cast<std::size_t>(*it)] = ncomp;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int w : radj[static_cast<std::size_t>(v)])
        if (comp[static_cast<std::size_t>(w)] < 0) {
          comp[static_cast<std::size_t>(w)] = ncomp;
          stack.push_back(w);
        }
    }
    ++ncomp;
  }

  std::vector<int> comp_size(static_cast<std::size_t>(ncomp), 0);
  std::vector<std::uint8_t> comp_loop(static_cast<std::size_t>(ncomp), 0);
  for (int v = 0; v < n; ++v) {
    ++comp_size[static_cast<std::size_t>(comp[static_cast<std::size_t>(v)])];
    for (int w : adj[static_cast<std::size_t>(v)])
      if (w == v) comp_loop[static_cast<std::size_t>(comp[static_cast<std::size_t>(v)])] = 1;
  }

  std::vector<int> recur;
  for (int v = 0; v < n; ++v) {
    int c = comp[static_cast<std::size_t>(v)];
    if (comp_size[static_cast<std::size_t>(c)] > 1 || comp_loop[static_cast<std::size_t>(c)])
      recur.push_back(v);
  }

  auto reach = [n](const std::vector<std::vector<int>>& g, const std::vector<int>& from) {
    std::vector<std::uint8_t> vis(static_cast<std::size_t>(n), 0);
    std::vector<int> stack = from;
    for (int v : from) vis[static_cast<std::size_t>(v)] = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int w : g[static_cast<std::size_t>(v)])
        if (!vis[static_cast<std::size_t>(w)]) {
          vis[static_cast<std::size_t>(w)] = 1;
          stack.push_back(w);
        }
    }
    return vis;
  };
  auto fwd = reach(radj, recur);  // reached by a recurrent component
  auto bwd = reach(adj, recur);   // reaches a recurrent component

  std::vector<int> out;
  for (int v = 0; v < n; ++v)
    if (fwd[static_cast<std::size_t>(v)] && bwd[static_cast<std::size_t>(v)])
      out.push_back(nodes[static_cast<std::size_t>(v)]);
  return out;
}

// ---------------------------------------------------------------------------
// Standalone cup-length on a small simplicial complex, dense bitvectors
// throughout. Cochains live over the sorted simplex lists per degree.

struct SmallComplex {
  std::vector<std::vector<int>> verts, edges, tris;  // sorted vertex lists, each list sorted
};

inline SmallComplex from_triangles(std::vector<std::array<int, 3>> tris) {
  std::set<std::vector<int>> vs, es, ts;
  for (auto t : tris) {
    std::sort(t.begin(), t.end());
    ts.insert({t[0], t[1], t[2]});
    es.insert({t[0], t[1]});
    es.insert({t[0], t[2]});
    es.insert({t[1], t[2]});
    vs.insert({t[0]});
    vs.insert({t[1]});
    vs.insert({t[2]});
  }
  SmallComplex c;
  c.verts = {vs.begin(), vs.end()};
  c.edges = {es.begin(), es.end()};
  c.tris = {ts.begin(), ts.end()};
  return c;
}

// The 7-vertex torus: two size-7 orbits of triangles under i -> i+1 mod 7.
inline SmallComplex seven_vertex_torus() {
  std::vector<std::array<int, 3>> tris;
  for (int i = 0; i < 7; ++i) {
    tris.push_back({i, (i + 1) % 7, (i + 3) % 7});
    tris.push_back({i, (i + 2) % 7, (i + 3) % 7});
  }
  return from_triangles(tris);
}

using Bits = std::vector<std::uint8_t>;

inline int find_index(const std::vector<std::vector<int>>& list, const std::vector<int>& s) {
  auto it = std::lower_bound(list.begin(), list.end(), s);
  return it != list.end() && *it == s ? static_cast<int>(it - list.begin()) : -1;
}

// reduce v against an echelon basis (rows with distinct pivots)
inline Bits reduce_against(Bits v, const std::vector<Bits>& basis,
                           const std::vector<int>& pivots) {
  for (std::size_t i = 0; i < basis.size(); ++i)
    if (v[static_cast<std::size_t>(pivots[i])])
      for (std::size_t k = 0; k < v.size(); ++k) v[k] ^= basis[i][k];
  return v;
}

inline bool is_zero(const Bits& v) {
  for (auto b : v)
    if (b) return false;
  return true;
}

inline void add_to_echelon(Bits v, std::vector<Bits>& basis, std::vector<int>& pivots) {
  v = reduce_against(std::move(v), basis, pivots);
  for (std::size_t k = 0; k < v.size(); ++k)
    if (v[k]) {
      basis.push_back(v);
      pivots.push_back(static_cast<int>(k));
      return;
    }
}

// cup of 1-cochains evaluated on every triangle [v0 < v1 < v2]:
// (f cup g)(t) = f([v0,v1]) g([v1,v2])
inline Bits cup11(const SmallComplex& c, const Bits& f, const Bits& g) {
  Bits out(c.tris.size(), 0);
  for (std::size_t t = 0; t < c.tris.size(); ++t) {
    const auto& tr = c.tris[t];
    int front = find_index(c.edges, {tr[0], tr[1]});
    int back = find_index(c.edges, {tr[1], tr[2]});
    out[t] = f[static_cast<std::size_t>(front)] & g[static_cast<std::size_t>(back)];
  }
  return out;
}

// Longest nonvanishing product of positive-degree classes. On a 2-complex
// this is 2 when some pair of degree-1 generators multiplies to a class
// outside the image of the degree-1 coboundary, 1 when positive-degree
// cohomology exists at all, else 0.
inline int small_cup_length(const SmallComplex& c) {
  std::size_t nv = c.verts.size(), ne = c.edges.size(), nt = c.tris.size();

  // coboundary of a vertex indicator: edges containing the vertex
  std::vector<Bits> im_d0;
  std::vector<int> im_d0_piv;
  for (std::size_t v = 0; v < nv; ++v) {
    Bits row(ne, 0);
    for (std::size_t e = 0; e < ne; ++e)
      if (c.edges[e][0] == c.verts[v][0] || c.edges[e][1] == c.verts[v][0]) row[e] = 1;
    add_to_echelon(std::move(row), im_d0, im_d0_piv);
  }

  // coboundary of an edge indicator: triangles containing the edge
  std::vector<Bits> im_d1;
  std::vector<int> im_d1_piv;
  for (std::size_t e = 0; e < ne; ++e) {
    Bits row(nt, 0);
    for (std::size_t t = 0; t < nt; ++t) {
      const auto& tr = c.tris[t];
      bool has = std::includes(tr.begin(), tr.end(), c.edges[e].begin(), c.edges[e].end());
      if (has) row[t] = 1;
    }
    add_to_echelon(std::move(row), im_d1, im_d1_piv);
  }

  // kernel of d1: brute force over the span of single-edge cochains is too
  // big; instead solve by elimination. Build d1 as rows = triangles.
  std::vector<Bits> d1_cols(ne, Bits(nt, 0));
  for (std::size_t e = 0; e < ne; ++e)
    for (std::size_t t = 0; t < nt; ++t)
      d1_cols[e][t] = std::includes(c.tris[t].begin(), c.tris[t].end(), c.edges[e].begin(),
                                    c.edges[e].end())
                          ? 1
                          : 0;
  // eliminate: track combinations. col-reduce the matrix whose columns are
  // d1(e); kernel vectors are combinations reducing to zero.
  std::vector<Bits> basis;        // echelon over triangle space
  std::vector<int> piv;           // pivot triangle per basis row
  std::vector<Bits> combo;        // edge-space combination per basis row
  std::vector<Bits> kernel;       // edge-space kernel vectors
  for (std::size_t e = 0; e < ne; ++e) {
    Bits v = d1_cols[e];
    Bits who(ne, 0);
    who[e] = 1;
    for (std::size_t i = 0; i < basis.size(); ++i)
      if (v[static_cast<std::size_t>(piv[i])]) {
        for (std::size_t k = 0; k < nt; ++k) v[k] ^= basis[i][k];
        for (std::size_t k = 0; k < ne; ++k) who[k] ^= combo[i][k];
      }
    bool zero = true;
    for (std::size_t k = 0; k < nt; ++k)
      if (v[k]) {
        basis.push_back(v);
        piv.push_back(static_cast<int>(k));
        combo.push_back(who);
        zero = false;
        break;
      }
    if (zero) kernel.push_back(who);
  }

  // H1 generators: kernel vectors extending the image of d0
  std::vector<Bits> h1;
  {
    auto span = im_d0;
    auto span_piv = im_d0_piv;
    for (const Bits& k : kernel) {
      Bits red = reduce_against(k, span, span_piv);
      if (!is_zero(red)) {
        h1.push_back(k);
        add_to_echelon(std::move(red), span, span_piv);
      }
    }
  }

  bool h2 = im_d1.size() < nt;  // H2 = triangles / im d1
  int best = !h1.empty() || h2 ? 1 : 0;
  for (const Bits& f : h1)
    for (const Bits& g : h1) {
      Bits p = cup11(c, f, g);
      if (!is_zero(reduce_against(p, im_d1, im_d1_piv))) best = 2;
    }
  return best;
}

}  // namespace oracle
