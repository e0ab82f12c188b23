#pragma once

// Mod-2 homology of cubical pairs and greedy collapse certificates.

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cubcat/cubes.hpp"
#include "cubcat/gf2.hpp"

namespace cubcat {

using BettiVector = std::vector<int>;

struct CubicalPair {
  Complex N, L;  // L is a subcomplex of N; chains are taken relative to L
};

inline CubicalPair build_pair(Complex N, Complex L) {
  if (!(N.lat == L.lat)) throw std::invalid_argument("pair complexes live on different lattices");
  if (!subcomplex_of(L, N)) throw std::invalid_argument("L must be a subcomplex of N");
  return CubicalPair{std::move(N), std::move(L)};
}

inline CubicalPair build_pair(const Grid& g, const CellSet& N_cells, const CellSet& L_cells) {
  return build_pair(hull_complex(g, N_cells), hull_complex(g, L_cells));
}

namespace detail {

struct RelChainData {
  int dim = 0;                                  // ambient dimension
  std::vector<std::vector<CubeKey>> cubes;      // free cubes per degree
  std::vector<std::map<CubeKey, int>> index;    // key -> column per degree
};

inline RelChainData rel_chains(const CubicalPair& p) {
  RelChainData d;
  d.dim = p.N.lat.dim;
  d.cubes.resize(static_cast<std::size_t>(d.dim) + 1);
  d.index.resize(static_cast<std::size_t>(d.dim) + 1);
  for (CubeKey k : p.N.cubes) {
    if (p.L.contains(k)) continue;
    int q = cube_dim(p.N.lat, k);
    d.index[static_cast<std::size_t>(q)].emplace(
        k, static_cast<int>(d.cubes[static_cast<std::size_t>(q)].size()));
    d.cubes[static_cast<std::size_t>(q)].push_back(k);
  }
  return d;
}

// Rows are free (q-1)-cubes, columns free q-cubes.
inline gf2::Mat boundary_matrix(const CubicalPair& p, const RelChainData& d, int q) {
  int rows = q >= 1 ? static_cast<int>(d.cubes[static_cast<std::size_t>(q) - 1].size()) : 0;
  int cols = q >= 0 && q <= d.dim
                 ? static_cast<int>(d.cubes[static_cast<std::size_t>(q)].size())
                 : 0;
  gf2::Mat m(rows, cols);
  if (q < 1 || q > d.dim) return m;
  for (int j = 0; j < cols; ++j) {
    Cube c = cube_of(p.N.lat, d.cubes[static_cast<std::size_t>(q)][static_cast<std::size_t>(j)]);
    for (int a = 0; a < p.N.lat.dim; ++a) {
      if (!(c.mask & (1u << a))) continue;
      CubeKey lo, hi;
      codim1_faces(p.N.lat, c, a, lo, hi);
      for (CubeKey f : {lo, hi}) {
        auto it = d.index[static_cast<std::size_t>(q) - 1].find(f);
        if (it != d.index[static_cast<std::size_t>(q) - 1].end())
          m.flip(it->second, j);  // a face hit twice cancels mod 2
      }
    }
  }
  return m;
}

}  // namespace detail

// betti[q] = dim ker boundary_q - rank boundary_{q+1}, one entry per degree
// 0..ambient dim.
inline BettiVector relative_betti(const CubicalPair& p) {
  auto d = detail::rel_chains(p);
  BettiVector betti(static_cast<std::size_t>(d.dim) + 1, 0);
  std::vector<int> ranks(static_cast<std::size_t>(d.dim) + 2, 0);
  for (int q = 1; q <= d.dim; ++q)
    ranks[static_cast<std::size_t>(q)] = gf2::rank_of(detail::boundary_matrix(p, d, q));
  for (int q = 0; q <= d.dim; ++q) {
    int nq = static_cast<int>(d.cubes[static_cast<std::size_t>(q)].size());
    betti[static_cast<std::size_t>(q)] =
        nq - ranks[static_cast<std::size_t>(q)] - ranks[static_cast<std::size_t>(q) + 1];
  }
  return betti;
}

inline int euler_characteristic(const CubicalPair& p) {
  auto d = detail::rel_chains(p);
  int e = 0;
  for (int q = 0; q <= d.dim; ++q) {
    int nq = static_cast<int>(d.cubes[static_cast<std::size_t>(q)].size());
    e += (q % 2 == 0) ? nq : -nq;
  }
  return e;
}

// One elementary collapse step: a free cube and its unique strict coface.
using CollapseStep = std::pair<CubeKey, CubeKey>;
using CollapseSeq = std::vector<CollapseStep>;

// Greedy free-face collapse, lowest dimension first, smallest key first.
// Success means the complex shrinks to a single vertex; failure to find a
// sequence proves nothing.
inline std::optional<CollapseSeq> collapse_certificate(const Complex& cx) {
  if (cx.cubes.empty()) return std::nullopt;
  std::map<CubeKey, std::vector<CubeKey>> strict_cofaces;
  std::map<CubeKey, int> alive_cofaces;
  for (CubeKey k : cx.cubes) alive_cofaces[k] = 0;
  for (CubeKey k : cx.cubes)
    for (CubeKey f : proper_faces(cx.lat, k)) {
      strict_cofaces[f].push_back(k);
      ++alive_cofaces[f];
    }
  std::map<CubeKey, bool> alive;
  for (CubeKey k : cx.cubes) alive[k] = true;
  std::size_t remaining = cx.cubes.size();

  // Candidate queue ordered by (dim, key); entries are revalidated when popped.
  auto cand_rank = [&](CubeKey k) {
    return std::make_pair(cube_dim(cx.lat, k), k);
  };
  std::map<std::pair<int, CubeKey>, CubeKey> cands;
  for (CubeKey k : cx.cubes)
    if (alive_cofaces[k] == 1) cands.emplace(cand_rank(k), k);

  CollapseSeq seq;
  auto remove_cube = [&](CubeKey k) {
    alive[k] = false;
    --remaining;
    for (CubeKey f : proper_faces(cx.lat, k)) {
      auto it = alive_cofaces.find(f);
      if (it == alive_cofaces.end() || !alive[f]) continue;
      if (--it->second == 1) cands.emplace(cand_rank(f), f);
    }
  };
  while (!cands.empty()) {
    auto it = cands.begin();
    CubeKey sigma = it->second;
    cands.erase(it);
    if (!alive[sigma] || alive_cofaces[sigma] != 1) continue;
    CubeKey tau = 0;
    bool found = false;
    for (CubeKey t : strict_cofaces[sigma])
      if (alive[t]) {
        tau = t;
        found = true;
        break;
      }
    if (!found) continue;
    remove_cube(tau);
    remove_cube(sigma);
    seq.emplace_back(sigma, tau);
  }
  if (remaining != 1) return std::nullopt;
  for (auto& [k, a] : alive)
    if (a && cube_dim(cx.lat, k) != 0) return std::nullopt;
  return seq;
}

inline bool collapsible(const Complex& cx) { return collapse_certificate(cx).has_value(); }

// Replays a recorded sequence, re-checking freeness of every step.
inline bool verify_collapse(const Complex& cx, const CollapseSeq& seq) {
  std::map<CubeKey, int> alive_cofaces;
  std::map<CubeKey, bool> alive;
  for (CubeKey k : cx.cubes) {
    alive[k] = true;
    alive_cofaces[k] = 0;
  }
  for (CubeKey k : cx.cubes)
    for (CubeKey f : proper_faces(cx.lat, k))
      if (alive.count(f)) ++alive_cofaces[f];
  std::size_t remaining = cx.cubes.size();
  for (auto [sigma, tau] : seq) {
    if (!alive.count(sigma) || !alive.count(tau) || !alive[sigma] || !alive[tau])
      return false;
    if (alive_cofaces[sigma] != 1) return false;
    if (cube_dim(cx.lat, tau) != cube_dim(cx.lat, sigma) + 1) return false;
    auto faces = proper_faces(cx.lat, tau);
    if (!std::binary_search(faces.begin(), faces.end(), sigma)) return false;
    for (CubeKey k : {tau, sigma}) {
      alive[k] = false;
      --remaining;
      for (CubeKey f : proper_faces(cx.lat, k))
        if (alive.count(f) && alive[f]) --alive_cofaces[f];
    }
  }
  if (remaining != 1) return false;
  for (auto& [k, a] : alive)
    if (a && cube_dim(cx.lat, k) != 0) return false;
  return true;
}

}  // namespace cubcat
