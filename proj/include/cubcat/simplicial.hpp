#pragma once

// Staircase triangulation of cubical pairs, mod-2 cohomology, and the
// cup-length invariant used by the category lower bound.

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "cubcat/cubes.hpp"
#include "cubcat/gf2.hpp"
#include "cubcat/homology.hpp"

namespace cubcat {

using Simplex = std::vector<CubeKey>;  // vertex keys, strictly increasing

namespace detail {

// Maximal simplices of one cube: one vertex chain per ordering of its axes.
inline std::vector<Simplex> cube_chains(const CubeLattice& lat, CubeKey key) {
  Cube c = cube_of(lat, key);
  std::vector<int> axes;
  for (int a = 0; a < lat.dim; ++a)
    if (c.mask & (1u << a)) axes.push_back(a);
  std::sort(axes.begin(), axes.end());
  std::vector<Simplex> out;
  do {
    Simplex s;
    std::vector<int> v = c.base;
    s.push_back(cube_key(lat, v, 0));
    for (int a : axes) {
      v[static_cast<std::size_t>(a)] += 1;
      s.push_back(cube_key(lat, v, 0));
    }
    std::sort(s.begin(), s.end());
    out.push_back(std::move(s));
  } while (std::next_permutation(axes.begin(), axes.end()));
  return out;
}

inline std::set<Simplex> triangulate(const Complex& cx) {
  for (int a = 0; a < cx.lat.dim; ++a)
    if (cx.lat.periodic[static_cast<std::size_t>(a)] &&
        cx.lat.vcounts[static_cast<std::size_t>(a)] < 3)
      throw std::invalid_argument(
          "axis " + std::to_string(a) +
          ": a periodic axis needs at least 3 subdivisions to triangulate");
  std::set<Simplex> simps;
  std::vector<Simplex> work;
  for (CubeKey k : cx.cubes)
    for (auto& s : cube_chains(cx.lat, k))
      if (simps.insert(s).second) work.push_back(s);
  while (!work.empty()) {
    Simplex s = std::move(work.back());
    work.pop_back();
    if (s.size() <= 1) continue;
    for (std::size_t drop = 0; drop < s.size(); ++drop) {
      Simplex f;
      for (std::size_t i = 0; i < s.size(); ++i)
        if (i != drop) f.push_back(s[i]);
      if (simps.insert(f).second) work.push_back(f);
    }
  }
  return simps;
}

}  // namespace detail

// Cochain complex of a triangulated pair; cochains vanish on the subcomplex,
// so only simplices outside it carry coordinates.
struct SimplicialPair {
  int top = 0;
  std::vector<std::vector<Simplex>> simp;          // simp[q]: relative q-simplices, sorted
  std::vector<std::map<Simplex, int>> index;       // simplex -> column id per degree
  std::vector<gf2::Mat> delta;                     // delta[q]: rows (q+1)-simplices, cols q

  int count(int q) const {
    return q >= 0 && q <= top ? static_cast<int>(simp[static_cast<std::size_t>(q)].size()) : 0;
  }
};

inline SimplicialPair triangulate_pair(const CubicalPair& p) {
  auto nset = detail::triangulate(p.N);
  std::set<Simplex> lset;
  if (!p.L.empty()) lset = detail::triangulate(p.L);
  SimplicialPair sp;
  for (const auto& s : nset)
    sp.top = std::max(sp.top, static_cast<int>(s.size()) - 1);
  sp.simp.resize(static_cast<std::size_t>(sp.top) + 1);
  sp.index.resize(static_cast<std::size_t>(sp.top) + 1);
  for (const auto& s : nset) {
    if (lset.count(s)) continue;
    auto q = s.size() - 1;
    sp.index[q].emplace(s, static_cast<int>(sp.simp[q].size()));
    sp.simp[q].push_back(s);
  }
  sp.delta.resize(static_cast<std::size_t>(sp.top) + 1);
  for (int q = 0; q < sp.top; ++q) {
    auto& m = sp.delta[static_cast<std::size_t>(q)];
    m = gf2::Mat(sp.count(q + 1), sp.count(q));
    const auto& hi = sp.simp[static_cast<std::size_t>(q) + 1];
    for (int r = 0; r < static_cast<int>(hi.size()); ++r) {
      const Simplex& s = hi[static_cast<std::size_t>(r)];
      for (std::size_t drop = 0; drop < s.size(); ++drop) {
        Simplex f;
        for (std::size_t i = 0; i < s.size(); ++i)
          if (i != drop) f.push_back(s[i]);
        auto it = sp.index[static_cast<std::size_t>(q)].find(f);
        if (it != sp.index[static_cast<std::size_t>(q)].end()) m.flip(r, it->second);
      }
    }
  }
  sp.delta[static_cast<std::size_t>(sp.top)] = gf2::Mat(0, sp.count(sp.top));
  return sp;
}

// Cohomology of the pair: coboundary row spaces plus representative cocycles
// extending them to the full cocycle space, one per independent class.
struct Cohomology {
  std::vector<int> betti;                       // betti[q], q = 0..top
  std::vector<std::vector<gf2::Vec>> gens;      // class representatives per degree
  std::vector<gf2::Echelon> coboundaries;       // image of delta[q-1] per degree
};

inline Cohomology cohomology(const SimplicialPair& sp) {
  Cohomology h;
  h.betti.assign(static_cast<std::size_t>(sp.top) + 1, 0);
  h.gens.resize(static_cast<std::size_t>(sp.top) + 1);
  for (int q = 0; q <= sp.top; ++q) {
    gf2::Echelon span(sp.count(q));
    if (q >= 1) {
      // image of delta[q-1] lives in degree q: one column per (q-1)-cochain
      const gf2::Mat& d = sp.delta[static_cast<std::size_t>(q) - 1];
      for (int col = 0; col < d.cols; ++col) {
        gf2::Vec img(d.rows);
        for (int r = 0; r < d.rows; ++r)
          if (d.get(r, col)) img.flip(r);
        span.add(std::move(img));
      }
    }
    h.coboundaries.push_back(span);
    for (auto& z : gf2::kernel_basis(sp.delta[static_cast<std::size_t>(q)]))
      if (span.add(z)) {
        h.gens[static_cast<std::size_t>(q)].push_back(std::move(z));
        ++h.betti[static_cast<std::size_t>(q)];
      }
  }
  return h;
}

// Front-face/back-face product of cochains under the global vertex order.
// Relative cochains stay relative: a simplex inside the subcomplex has its
// front face inside it too, so the product vanishes there.
inline gf2::Vec cup(const SimplicialPair& sp, int p, const gf2::Vec& f, int q,
                    const gf2::Vec& g) {
  int pq = p + q;
  gf2::Vec out(sp.count(pq));
  if (pq > sp.top) return out;
  const auto& sims = sp.simp[static_cast<std::size_t>(pq)];
  for (int i = 0; i < static_cast<int>(sims.size()); ++i) {
    const Simplex& s = sims[static_cast<std::size_t>(i)];
    Simplex front(s.begin(), s.begin() + p + 1);
    Simplex back(s.begin() + p, s.end());
    auto fit = sp.index[static_cast<std::size_t>(p)].find(front);
    if (fit == sp.index[static_cast<std::size_t>(p)].end() || !f.get(fit->second)) continue;
    auto git = sp.index[static_cast<std::size_t>(q)].find(back);
    if (git == sp.index[static_cast<std::size_t>(q)].end() || !g.get(git->second)) continue;
    out.flip(i);
  }
  return out;
}

// Longest nonvanishing product of positive-degree classes; 0 when no
// positive-degree cohomology exists.
inline int cup_length(const SimplicialPair& sp, const Cohomology& h) {
  struct Entry {
    int deg;
    gf2::Vec reduced;  // canonical form modulo coboundaries
    gf2::Vec rep;
  };
  std::vector<Entry> frontier;
  for (int q = 1; q <= sp.top; ++q)
    for (const auto& g : h.gens[static_cast<std::size_t>(q)])
      frontier.push_back(
          {q, h.coboundaries[static_cast<std::size_t>(q)].reduce(g), g});
  if (frontier.empty()) return 0;
  int length = 1;
  while (true) {
    std::vector<Entry> next;
    std::set<std::pair<int, std::vector<std::uint64_t>>> seen;
    for (const auto& e : frontier)
      for (int q = 1; q + e.deg <= sp.top; ++q)
        for (const auto& g : h.gens[static_cast<std::size_t>(q)]) {
          gf2::Vec prod = cup(sp, e.deg, e.rep, q, g);
          gf2::Vec red = h.coboundaries[static_cast<std::size_t>(e.deg + q)].reduce(prod);
          if (red.zero()) continue;
          if (seen.insert({e.deg + q, red.w}).second)
            next.push_back({e.deg + q, std::move(red), std::move(prod)});
        }
    if (next.empty()) return length;
    frontier = std::move(next);
    ++length;
  }
}

// Cup length of the pair of cell-set hulls.
inline int cup_length(const Grid& g, const CellSet& N_cells, const CellSet& L_cells) {
  if (N_cells.empty()) return 0;
  auto pair = build_pair(g, N_cells, L_cells);
  auto sp = triangulate_pair(pair);
  return cup_length(sp, cohomology(sp));
}

}  // namespace cubcat
