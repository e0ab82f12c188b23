#pragma once

// Cubical complexes on the vertex lattice of a grid. A cube is a base vertex
// multi-index plus an extent bitmask (which axes the cube spans). Keys pack
// base and mask into one integer; complexes are sorted key vectors closed
// under taking faces.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "cubcat/core.hpp"

namespace cubcat {

using CubeKey = std::uint64_t;

struct CubeLattice {
  int dim = 0;
  std::vector<int> vcounts;  // distinct vertex coordinates per axis
  std::vector<std::uint8_t> periodic;

  bool operator==(const CubeLattice&) const = default;
};

inline CubeLattice lattice_of(const Grid& g) {
  CubeLattice lat;
  lat.dim = g.dim;
  lat.periodic = g.periodic;
  for (int a = 0; a < g.dim; ++a)
    lat.vcounts.push_back(g.periodic[a] ? g.counts[a] : g.counts[a] + 1);
  return lat;
}

struct Cube {
  std::vector<int> base;
  unsigned mask = 0;
  int dim() const { return std::popcount(mask); }
};

inline CubeKey cube_key(const CubeLattice& lat, std::vector<int> base, unsigned mask) {
  CubeKey k = 0;
  for (int a = lat.dim - 1; a >= 0; --a) {
    int b = base[static_cast<std::size_t>(a)];
    int n = lat.vcounts[static_cast<std::size_t>(a)];
    if (lat.periodic[static_cast<std::size_t>(a)]) {
      b %= n;
      if (b < 0) b += n;
    } else if (b < 0 || b >= n) {
      throw std::out_of_range("cube base outside the vertex lattice");
    }
    k = k * static_cast<CubeKey>(n) + static_cast<CubeKey>(b);
  }
  return (k << lat.dim) | mask;
}

inline Cube cube_of(const CubeLattice& lat, CubeKey key) {
  Cube c;
  c.mask = static_cast<unsigned>(key & ((1u << lat.dim) - 1));
  CubeKey k = key >> lat.dim;
  c.base.resize(static_cast<std::size_t>(lat.dim));
  for (int a = 0; a < lat.dim; ++a) {
    int n = lat.vcounts[static_cast<std::size_t>(a)];
    c.base[static_cast<std::size_t>(a)] = static_cast<int>(k % static_cast<CubeKey>(n));
    k /= static_cast<CubeKey>(n);
  }
  return c;
}

inline int cube_dim(const CubeLattice& lat, CubeKey key) {
  return std::popcount(static_cast<unsigned>(key & ((1u << lat.dim) - 1)));
}

// The two codimension-one faces of a cube along one of its spanned axes.
inline void codim1_faces(const CubeLattice& lat, const Cube& c, int axis,
                         CubeKey& lo, CubeKey& hi) {
  unsigned m = c.mask & ~(1u << axis);
  lo = cube_key(lat, c.base, m);
  std::vector<int> b = c.base;
  b[static_cast<std::size_t>(axis)] += 1;
  hi = cube_key(lat, b, m);
}

// All proper faces, every codimension.
inline std::vector<CubeKey> proper_faces(const CubeLattice& lat, CubeKey key) {
  Cube c = cube_of(lat, key);
  std::vector<int> axes;
  for (int a = 0; a < lat.dim; ++a)
    if (c.mask & (1u << a)) axes.push_back(a);
  int k = static_cast<int>(axes.size());
  std::vector<CubeKey> out;
  for (unsigned keep = 0; keep < (1u << k); ++keep) {
    if (keep == (1u << k) - 1) continue;  // the cube itself
    unsigned drop_count = static_cast<unsigned>(k) - std::popcount(keep);
    for (unsigned sides = 0; sides < (1u << drop_count); ++sides) {
      std::vector<int> b = c.base;
      unsigned m = 0;
      unsigned si = 0;
      for (int i = 0; i < k; ++i) {
        int a = axes[static_cast<std::size_t>(i)];
        if (keep & (1u << i)) {
          m |= 1u << a;
        } else {
          if (sides & (1u << si)) b[static_cast<std::size_t>(a)] += 1;
          ++si;
        }
      }
      out.push_back(cube_key(lat, b, m));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Corner vertices of a cube, as vertex keys (dim-0 cube keys).
inline std::vector<CubeKey> cube_vertices(const CubeLattice& lat, CubeKey key) {
  Cube c = cube_of(lat, key);
  std::vector<int> axes;
  for (int a = 0; a < lat.dim; ++a)
    if (c.mask & (1u << a)) axes.push_back(a);
  std::vector<CubeKey> out;
  for (unsigned s = 0; s < (1u << axes.size()); ++s) {
    std::vector<int> b = c.base;
    for (std::size_t i = 0; i < axes.size(); ++i)
      if (s & (1u << i)) b[static_cast<std::size_t>(axes[i])] += 1;
    out.push_back(cube_key(lat, b, 0));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct Complex {
  CubeLattice lat;
  std::vector<CubeKey> cubes;  // sorted, closed under faces

  bool contains(CubeKey k) const {
    return std::binary_search(cubes.begin(), cubes.end(), k);
  }
  bool empty() const { return cubes.empty(); }
  int top_dim() const {
    int d = 0;
    for (CubeKey k : cubes) d = std::max(d, cube_dim(lat, k));
    return d;
  }
  std::vector<CubeKey> of_dim(int k) const {
    std::vector<CubeKey> out;
    for (CubeKey c : cubes)
      if (cube_dim(lat, c) == k) out.push_back(c);
    return out;
  }
};

inline Complex closure_complex(const CubeLattice& lat, std::vector<CubeKey> seeds) {
  std::vector<CubeKey> all = seeds;
  for (CubeKey k : seeds) {
    auto f = proper_faces(lat, k);
    all.insert(all.end(), f.begin(), f.end());
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return Complex{lat, std::move(all)};
}

// Closed hull of a set of grid cells: their top cubes with all faces.
inline Complex hull_complex(const Grid& g, const CellSet& cells) {
  CubeLattice lat = lattice_of(g);
  unsigned full = (1u << g.dim) - 1;
  std::vector<CubeKey> seeds;
  for (CellId c : cells) seeds.push_back(cube_key(lat, g.multi(c), full));
  return closure_complex(lat, std::move(seeds));
}

inline bool subcomplex_of(const Complex& a, const Complex& b) {
  return std::includes(b.cubes.begin(), b.cubes.end(), a.cubes.begin(), a.cubes.end());
}

inline Complex complex_union(const Complex& a, const Complex& b) {
  Complex r;
  r.lat = a.lat;
  r.cubes.reserve(a.cubes.size() + b.cubes.size());
  std::set_union(a.cubes.begin(), a.cubes.end(), b.cubes.begin(), b.cubes.end(),
                 std::back_inserter(r.cubes));
  return r;
}

// Halves every lattice step; each cube splits into 2^dim congruent cubes.
inline Complex subdivide(const Complex& cx) {
  CubeLattice fine;
  fine.dim = cx.lat.dim;
  fine.periodic = cx.lat.periodic;
  for (int a = 0; a < cx.lat.dim; ++a) {
    int n = cx.lat.vcounts[static_cast<std::size_t>(a)];
    fine.vcounts.push_back(cx.lat.periodic[static_cast<std::size_t>(a)] ? 2 * n
                                                                        : 2 * (n - 1) + 1);
  }
  std::vector<CubeKey> out;
  for (CubeKey k : cx.cubes) {
    Cube c = cube_of(cx.lat, k);
    std::vector<int> axes;
    for (int a = 0; a < cx.lat.dim; ++a)
      if (c.mask & (1u << a)) axes.push_back(a);
    for (unsigned s = 0; s < (1u << axes.size()); ++s) {
      std::vector<int> b(static_cast<std::size_t>(cx.lat.dim));
      for (int a = 0; a < cx.lat.dim; ++a)
        b[static_cast<std::size_t>(a)] = 2 * c.base[static_cast<std::size_t>(a)];
      for (std::size_t i = 0; i < axes.size(); ++i)
        if (s & (1u << i)) b[static_cast<std::size_t>(axes[i])] += 1;
      out.push_back(cube_key(fine, b, c.mask));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return Complex{fine, std::move(out)};
}

// Splits a set of cubes into connected components; cubes touch when they
// share a vertex.
inline std::vector<std::vector<CubeKey>> vertex_components(const CubeLattice& lat,
                                                           const std::vector<CubeKey>& keys) {
  std::map<CubeKey, int> owner;  // vertex -> representative component
  std::vector<int> parent(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) parent[i] = static_cast<int>(i);
  std::function<int(int)> find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  auto unite = [&](int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); };
  for (std::size_t i = 0; i < keys.size(); ++i)
    for (CubeKey v : cube_vertices(lat, keys[i])) {
      auto [it, fresh] = owner.emplace(v, static_cast<int>(i));
      if (!fresh) unite(static_cast<int>(i), it->second);
    }
  std::map<int, std::vector<CubeKey>> groups;
  for (std::size_t i = 0; i < keys.size(); ++i)
    groups[find(static_cast<int>(i))].push_back(keys[i]);
  std::vector<std::vector<CubeKey>> out;
  for (auto& [root, g] : groups) {
    std::sort(g.begin(), g.end());
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace cubcat
