#pragma once

// Categorical covers built from Morse data, rest point counting, and an
// exhaustive reference bound for small complexes.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "cubcat/core.hpp"
#include "cubcat/cubes.hpp"
#include "cubcat/homology.hpp"
#include "cubcat/morse.hpp"
#include "cubcat/quotient.hpp"
#include "cubcat/simplicial.hpp"

namespace cubcat {

// ---------------------------------------------------------------------------
// Cover construction.

struct CoverElement {
  int morse_index = 0;  // 1-based stage; 0 marks the basepoint element
  CellSet cells;
  CellSet target;       // carrier the cells flow into
  int flow_time = 0;
  std::string kind;     // collapse-in-carrier | flow-into-certified | residual-collapse
  CollapseSeq target_collapse;
};

struct CategoricalCover {
  std::vector<CoverElement> elements;
  std::vector<int> per_morse_upper;  // standalone piece bound per Morse set
  CellSet residual;                  // interior cells outside every stage
  int residual_collapse_time = 0;
  bool basepoint_element = false;
  int upper = 0;                     // element count, the category upper bound
};

struct Ladder {
  int k = -1;       // ring radius whose hull collapsed; -1 when none did
  CellSet carrier;
  CollapseSeq seq;
  int pieces = 0;
};

// Smallest Chebyshev ring around M, clipped to the interior, whose hull
// admits a collapse. Falls back to one piece per cell.
inline Ladder neighborhood_ladder(const Grid& g, const CellSet& interior, const CellSet& M) {
  for (int k = 0; k <= 3; ++k) {
    CellSet cand = set_intersect(k_ring(g, M, k), interior);
    if (auto seq = collapse_certificate(hull_complex(g, cand)))
      return Ladder{k, std::move(cand), std::move(*seq), 1};
  }
  return Ladder{-1, M, {}, static_cast<int>(M.size())};
}

// Forward images confined to W: X_0 = W, X_{t+1} = image(X_t) within W. The
// sequence decreases, so it stabilizes within |W| steps; the returned list
// runs up to and including the fixed point.
inline std::vector<CellSet> restricted_trajectory(const PointedMap& pm, const CellSet& W) {
  std::vector<CellSet> traj{W};
  for (;;) {
    CellSet next;
    for (CellId c : traj.back())
      for (int j : pm.succ[static_cast<std::size_t>(pm.local_of(c))])
        if (j != pm.star()) next.push_back(pm.cell(j));
    next = set_intersect(canon(std::move(next)), W);
    if (next == traj.back()) return traj;
    traj.push_back(std::move(next));
  }
}

// One cover element per filtration stage: the stage's new cells flow into a
// collapsible carrier around its Morse set. Cells left over after all stages
// drain into the basepoint and form one extra element when an exit set
// exists.
inline CategoricalCover cover_from_morse(const PointedMap& pm, const MorseDecomposition& md) {
  const Grid& g = pm.F->grid;
  CategoricalCover cover;
  CellSet covered;
  for (int j = 1; j <= md.count(); ++j) {
    const CellSet& M = md.sets[static_cast<std::size_t>(j) - 1];
    Ladder lad = neighborhood_ladder(g, pm.interior, M);
    cover.per_morse_upper.push_back(lad.pieces);

    CellSet W = set_minus(md.filtration[static_cast<std::size_t>(j) - 1], covered);
    if (W.empty()) continue;
    auto traj = restricted_trajectory(pm, W);
    const CellSet& xinf = traj.back();

    CellSet U;
    CollapseSeq seq;
    bool found = false;
    for (int k = 0; k <= 3 && !found; ++k) {
      CellSet cand = set_intersect(k_ring(g, M, k), pm.interior);
      if (!subset_of(xinf, cand)) continue;
      if (auto s = collapse_certificate(hull_complex(g, cand))) {
        U = std::move(cand);
        seq = std::move(*s);
        found = true;
      }
    }
    if (!found) {
      if (auto s = collapse_certificate(hull_complex(g, xinf))) {
        U = xinf;
        seq = std::move(*s);
        found = true;
      }
    }
    if (found) {
      int t = 0;
      while (!subset_of(traj[static_cast<std::size_t>(t)], U)) ++t;
      CoverElement e;
      e.morse_index = j;
      e.cells = W;
      e.target = std::move(U);
      e.flow_time = t;
      e.kind = t == 0 ? "collapse-in-carrier" : "flow-into-certified";
      e.target_collapse = std::move(seq);
      cover.elements.push_back(std::move(e));
    } else {
      // Last resort: every cell is its own piece; a single cube always
      // collapses.
      for (CellId c : W) {
        CoverElement e;
        e.morse_index = j;
        e.cells = {c};
        e.target = {c};
        e.flow_time = 0;
        e.kind = "collapse-in-carrier";
        e.target_collapse = *collapse_certificate(hull_complex(g, {c}));
        cover.elements.push_back(std::move(e));
      }
    }
    covered = set_union(covered, W);
    if (!subset_of(md.filtration[static_cast<std::size_t>(j) - 1], covered))
      throw std::logic_error("cover stages fell behind the filtration");
  }

  cover.residual = set_minus(pm.interior, covered);
  if (!pm.L.empty()) {
    auto ct = collapse_time(pm, cover.residual);
    if (std::holds_alternative<NoCollapse>(ct))
      throw std::logic_error("residual cells never reach the basepoint");
    cover.residual_collapse_time = std::get<int>(ct);
    CoverElement e;
    e.morse_index = 0;
    e.cells = cover.residual;
    e.flow_time = cover.residual_collapse_time;
    e.kind = "residual-collapse";
    cover.elements.push_back(std::move(e));
    cover.basepoint_element = true;
  } else if (!cover.residual.empty()) {
    throw std::logic_error("no exit set, yet some interior cells escaped every stage");
  }
  cover.upper = static_cast<int>(cover.elements.size());
  return cover;
}

// Dynamics-free bound: one piece per cell.
inline CategoricalCover singleton_cover(const Grid& g, const CellSet& cells) {
  CategoricalCover cover;
  for (CellId c : cells) {
    CoverElement e;
    e.morse_index = 0;
    e.cells = {c};
    e.target = {c};
    e.kind = "collapse-in-carrier";
    e.target_collapse = *collapse_certificate(hull_complex(g, {c}));
    cover.elements.push_back(std::move(e));
  }
  cover.upper = static_cast<int>(cover.elements.size());
  return cover;
}

// ---------------------------------------------------------------------------
// Bounds and verdicts.

inline int hls_lower(const Grid& g, const CellSet& N, const CellSet& L) {
  if (N.empty()) return 0;
  return cup_length(g, N, L) + 1;
}

struct InequalityVerdicts {
  bool upper_within_morse_budget = false;  // upper <= basepoint term + sum of per-set bounds
  bool lower_at_most_upper = false;
  int sum_morse_upper = 0;
};

inline InequalityVerdicts verify_category_bounds(const CategoricalCover& cover, int lower,
                                                 bool exit_set_empty) {
  InequalityVerdicts v;
  for (int p : cover.per_morse_upper) v.sum_morse_upper += p;
  int budget = v.sum_morse_upper + (exit_set_empty ? 0 : 1);
  v.upper_within_morse_budget = cover.upper <= budget;
  v.lower_at_most_upper = lower <= cover.upper;
  return v;
}

// Sharper budget without the basepoint term; only meaningful when the exit
// set is empty.
inline std::string invariant_budget_verdict(const CategoricalCover& cover,
                                            bool exit_set_empty) {
  if (!exit_set_empty) return "not-applicable";
  int sum = 0;
  for (int p : cover.per_morse_upper) sum += p;
  return cover.upper <= sum ? "pass" : "fail";
}

// ---------------------------------------------------------------------------
// Rest points.

struct GradientLikeViolation : std::runtime_error {
  int morse_index;  // 1-based
  GradientLikeViolation(int j, const std::string& what)
      : std::runtime_error(what), morse_index(j) {}
};

struct RestClusters {
  std::vector<std::uint8_t> is_cluster;  // per Morse set, admissible order
  int count = 0;
};

// A Morse set counts as one rest cluster when every cell fixes itself and
// the set has Chebyshev extent at most max_diameter. Under the
// gradient-like flag a Morse set with no self-fixed cell is an error.
inline RestClusters verify_rest_points(const CellMap& F, const MorseDecomposition& md,
                                       bool gradient_like, int max_diameter) {
  RestClusters rc;
  for (std::size_t j = 0; j < md.sets.size(); ++j) {
    const CellSet& M = md.sets[j];
    bool all_self = true, any_self = false;
    for (CellId c : M) {
      bool s = set_contains(F.image(c), c);
      all_self = all_self && s;
      any_self = any_self || s;
    }
    if (gradient_like && !any_self)
      throw GradientLikeViolation(
          static_cast<int>(j) + 1,
          "morse set " + std::to_string(j + 1) +
              " has no self-fixed cell; the dynamics are not gradient-like");
    bool cluster = all_self && cheb_diameter(F.grid, M) <= max_diameter;
    rc.is_cluster.push_back(cluster ? 1 : 0);
    if (cluster) ++rc.count;
  }
  return rc;
}

// ---------------------------------------------------------------------------
// Exhaustive reference bound on a twice-subdivided ambient complex.
//
// A candidate piece is a connected clip of an axis-aligned window; it covers
// every top cube meeting its closed star, and is admitted only when that
// star's hull collapses. The reported value is the exact minimum number of
// admitted pieces covering the target, searched by branch and bound.

namespace detail {

using Mask = std::vector<std::uint64_t>;

inline Mask mask_make(std::size_t bits) { return Mask((bits + 63) / 64, 0); }
inline void mask_set(Mask& m, int i) { m[static_cast<std::size_t>(i) >> 6] |= 1ULL << (i & 63); }
inline bool mask_get(const Mask& m, int i) {
  return (m[static_cast<std::size_t>(i) >> 6] >> (i & 63)) & 1ULL;
}
inline bool mask_subset(const Mask& a, const Mask& b) {  // a within b
  for (std::size_t k = 0; k < a.size(); ++k)
    if (a[k] & ~b[k]) return false;
  return true;
}
inline int mask_count_and(const Mask& a, const Mask& b) {
  int c = 0;
  for (std::size_t k = 0; k < a.size(); ++k) c += std::popcount(a[k] & b[k]);
  return c;
}
inline bool mask_empty(const Mask& m) {
  for (auto w : m)
    if (w) return false;
  return true;
}

}  // namespace detail

struct HlsOracle {
  Grid grid;
  CellSet ambient;
  int max_pieces = 6;
  Complex fine;                      // ambient hull, subdivided twice
  std::vector<CubeKey> fine_top;     // its top cubes, sorted
  std::map<CubeKey, int> top_pos;
  std::vector<detail::Mask> pieces;  // coverage mask (closed star) per admitted piece

  static HlsOracle make(const Grid& g, const CellSet& ambient_cells, int max_pieces = 6);

  // Top cubes of the twice-subdivided hull of a native cell set.
  std::vector<CubeKey> fine_cubes_of(const CellSet& native) const {
    Complex c = subdivide(subdivide(hull_complex(grid, native)));
    std::vector<CubeKey> out;
    for (CubeKey k : c.cubes)
      if (cube_dim(c.lat, k) == grid.dim) out.push_back(k);
    return out;
  }

  // Closed star of the subdivided set within the subdivided ambient, as top
  // cubes.
  std::vector<CubeKey> subdivided_star(const CellSet& native) const {
    std::set<CubeKey> verts;
    for (CubeKey k : fine_cubes_of(native))
      for (CubeKey v : cube_vertices(fine.lat, k)) verts.insert(v);
    std::vector<CubeKey> out;
    for (CubeKey k : fine_top)
      for (CubeKey v : cube_vertices(fine.lat, k))
        if (verts.count(v)) {
          out.push_back(k);
          break;
        }
    return out;
  }

  std::optional<int> nu(const CellSet& target_native) const {
    return nu_fine(fine_cubes_of(target_native));
  }

  std::optional<int> nu_fine(const std::vector<CubeKey>& target_top) const {
    detail::Mask want = detail::mask_make(fine_top.size());
    for (CubeKey k : target_top) {
      auto it = top_pos.find(k);
      if (it == top_pos.end())
        throw std::invalid_argument("target cube lies outside the ambient complex");
      detail::mask_set(want, it->second);
    }
    if (detail::mask_empty(want)) return 0;

    // Candidates that help, largest coverage first.
    std::vector<const detail::Mask*> useful;
    for (const auto& p : pieces)
      if (detail::mask_count_and(p, want) > 0) useful.push_back(&p);
    std::sort(useful.begin(), useful.end(),
              [&](const detail::Mask* a, const detail::Mask* b) {
                return detail::mask_count_and(*a, want) > detail::mask_count_and(*b, want);
              });

    int n = static_cast<int>(fine_top.size());
    auto uncovered_bits = [&](const detail::Mask& got) {
      std::vector<int> out;
      for (int i = 0; i < n; ++i)
        if (detail::mask_get(want, i) && !detail::mask_get(got, i)) out.push_back(i);
      return out;
    };

    // Greedy seed.
    int greedy = 0;
    {
      detail::Mask got = detail::mask_make(fine_top.size());
      while (!uncovered_bits(got).empty()) {
        int best = -1, gain = 0;
        detail::Mask rem = want;
        for (std::size_t k = 0; k < rem.size(); ++k) rem[k] &= ~got[k];
        for (std::size_t i = 0; i < useful.size(); ++i) {
          int g = detail::mask_count_and(*useful[i], rem);
          if (g > gain) {
            gain = g;
            best = static_cast<int>(i);
          }
        }
        if (best < 0) return std::nullopt;  // nothing admitted covers the rest
        for (std::size_t k = 0; k < got.size(); ++k) got[k] |= (*useful[best])[k];
        ++greedy;
        if (greedy > max_pieces + 1) break;
      }
    }

    int best = greedy;
    // Depth-first improvement: branch on the hardest uncovered cube.
    std::vector<std::vector<int>> covers(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < useful.size(); ++i)
      for (int b = 0; b < n; ++b)
        if (detail::mask_get(*useful[i], b)) covers[static_cast<std::size_t>(b)].push_back(static_cast<int>(i));
    std::function<void(detail::Mask&, int)> dfs = [&](detail::Mask& got, int depth) {
      auto open = uncovered_bits(got);
      if (open.empty()) {
        best = std::min(best, depth);
        return;
      }
      if (depth + 1 >= best) return;
      int pick = open[0];
      std::size_t fewest = covers[static_cast<std::size_t>(open[0])].size();
      for (int b : open)
        if (covers[static_cast<std::size_t>(b)].size() < fewest) {
          fewest = covers[static_cast<std::size_t>(b)].size();
          pick = b;
        }
      for (int ci : covers[static_cast<std::size_t>(pick)]) {
        detail::Mask next = got;
        for (std::size_t k = 0; k < next.size(); ++k) next[k] |= (*useful[static_cast<std::size_t>(ci)])[k];
        dfs(next, depth + 1);
      }
    };
    detail::Mask none = detail::mask_make(fine_top.size());
    dfs(none, 0);
    if (best > max_pieces) return std::nullopt;
    return best;
  }
};

inline HlsOracle HlsOracle::make(const Grid& g, const CellSet& ambient_cells, int max_pieces) {
  if (ambient_cells.size() > 14)
    throw std::domain_error("ambient has more than 14 cells; the exhaustive bound is off the table");
  HlsOracle o;
  o.grid = g;
  o.ambient = ambient_cells;
  o.max_pieces = max_pieces;
  o.fine = subdivide(subdivide(hull_complex(g, ambient_cells)));
  for (CubeKey k : o.fine.cubes)
    if (cube_dim(o.fine.lat, k) == g.dim) {
      o.top_pos.emplace(k, static_cast<int>(o.fine_top.size()));
      o.fine_top.push_back(k);
    }
  int n = static_cast<int>(o.fine_top.size());

  // vertex -> incident top cubes
  std::map<CubeKey, std::vector<int>> at_vertex;
  for (int i = 0; i < n; ++i)
    for (CubeKey v : cube_vertices(o.fine.lat, o.fine_top[static_cast<std::size_t>(i)]))
      at_vertex[v].push_back(i);

  // Window clips, wrap-aware per axis, split into connected components.
  std::vector<std::vector<int>> bases(static_cast<std::size_t>(n));
  std::vector<int> extent(static_cast<std::size_t>(g.dim));
  for (int a = 0; a < g.dim; ++a)
    extent[static_cast<std::size_t>(a)] =
        o.fine.lat.periodic[static_cast<std::size_t>(a)]
            ? o.fine.lat.vcounts[static_cast<std::size_t>(a)]
            : o.fine.lat.vcounts[static_cast<std::size_t>(a)] - 1;
  for (int i = 0; i < n; ++i)
    bases[static_cast<std::size_t>(i)] = cube_of(o.fine.lat, o.fine_top[static_cast<std::size_t>(i)]).base;

  struct Run {
    int start, len;
  };
  std::vector<std::vector<Run>> runs(static_cast<std::size_t>(g.dim));
  for (int a = 0; a < g.dim; ++a) {
    int m = extent[static_cast<std::size_t>(a)];
    bool per = o.fine.lat.periodic[static_cast<std::size_t>(a)] != 0;
    for (int s = 0; s < m; ++s)
      for (int len = 1; len <= (per ? m : m - s); ++len) {
        runs[static_cast<std::size_t>(a)].push_back({s, len});
        if (per && len == m && s > 0) runs[static_cast<std::size_t>(a)].pop_back();
      }
  }
  auto in_run = [&](int a, const Run& r, int x) {
    int d = x - r.start;
    if (o.fine.lat.periodic[static_cast<std::size_t>(a)]) {
      int m = extent[static_cast<std::size_t>(a)];
      d %= m;
      if (d < 0) d += m;
    }
    return d >= 0 && d < r.len;
  };

  std::set<std::vector<int>> seen_clips;
  std::vector<std::vector<int>> cores;
  std::vector<int> window(static_cast<std::size_t>(g.dim), 0);
  std::function<void(int)> enumerate = [&](int axis) {
    if (axis == g.dim) {
      std::vector<int> members;
      for (int i = 0; i < n; ++i) {
        bool inside = true;
        for (int a = 0; a < g.dim && inside; ++a)
          inside = in_run(a, runs[static_cast<std::size_t>(a)][static_cast<std::size_t>(window[static_cast<std::size_t>(a)])],
                          bases[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)]);
        if (inside) members.push_back(i);
      }
      if (members.empty() || !seen_clips.insert(members).second) return;
      std::vector<CubeKey> keys;
      for (int i : members) keys.push_back(o.fine_top[static_cast<std::size_t>(i)]);
      for (auto& comp : vertex_components(o.fine.lat, keys)) {
        std::vector<int> core;
        for (CubeKey k : comp) core.push_back(o.top_pos.at(k));
        std::sort(core.begin(), core.end());
        cores.push_back(std::move(core));
      }
      return;
    }
    for (std::size_t r = 0; r < runs[static_cast<std::size_t>(axis)].size(); ++r) {
      window[static_cast<std::size_t>(axis)] = static_cast<int>(r);
      enumerate(axis + 1);
    }
  };
  enumerate(0);
  std::sort(cores.begin(), cores.end());
  cores.erase(std::unique(cores.begin(), cores.end()), cores.end());

  // Admit a core when the hull of its closed star collapses; it then covers
  // exactly that star.
  std::set<detail::Mask> seen_stars;
  for (const auto& core : cores) {
    std::set<int> star;
    for (int i : core)
      for (CubeKey v : cube_vertices(o.fine.lat, o.fine_top[static_cast<std::size_t>(i)]))
        for (int j : at_vertex[v]) star.insert(j);
    std::vector<CubeKey> star_keys;
    detail::Mask mask = detail::mask_make(static_cast<std::size_t>(n));
    for (int i : star) {
      star_keys.push_back(o.fine_top[static_cast<std::size_t>(i)]);
      detail::mask_set(mask, i);
    }
    if (!seen_stars.insert(mask).second) continue;
    if (collapsible(closure_complex(o.fine.lat, std::move(star_keys))))
      o.pieces.push_back(std::move(mask));
  }
  return o;
}

inline std::optional<int> brute_force_hls(const Grid& g, const CellSet& target,
                                          const CellSet& ambient, int max_pieces = 6) {
  return HlsOracle::make(g, ambient, max_pieces).nu(target);
}

// ---------------------------------------------------------------------------
// Sampled axiom check against the exhaustive bound.

struct AxiomCheck {
  int samples = 0;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Samples random subsets of the oracle ambient and checks, in order:
// monotonicity, subadditivity, invariance under passing to the closed star
// of the subdivision, non-increase along the cell map's images, and
// normalization on single cells.
inline AxiomCheck axioms_check(const HlsOracle& oracle, const CellMap* F,
                               std::uint64_t seed, int samples) {
  std::mt19937_64 rng(seed);
  auto draw = [&](const CellSet& from) {
    CellSet s;
    for (CellId c : from)
      if (rng() & 1) s.push_back(c);
    return s;
  };
  auto names = [&](const CellSet& s) {
    std::ostringstream out;
    out << "{";
    for (std::size_t i = 0; i < s.size(); ++i)
      out << (i ? " " : "") << oracle.grid.cell_name(s[i]);
    out << "}";
    return out.str();
  };
  AxiomCheck report;
  report.samples = samples;
  for (int it = 0; it < samples; ++it) {
    CellSet A = draw(oracle.ambient);
    CellSet B = draw(oracle.ambient);
    CellSet AB = set_union(A, B);
    auto nA = oracle.nu(A), nB = oracle.nu(B), nAB = oracle.nu(AB);
    if (!nA || !nB || !nAB) continue;
    if (*nA > *nAB)
      report.violations.push_back("monotonicity: value " + std::to_string(*nA) + " on " +
                                  names(A) + " exceeds " + std::to_string(*nAB) +
                                  " on its superset " + names(AB));
    if (*nAB > *nA + *nB)
      report.violations.push_back("subadditivity: " + names(A) + " and " + names(B) +
                                  " give " + std::to_string(*nA) + "+" + std::to_string(*nB) +
                                  " < " + std::to_string(*nAB) + " on their union");
    if (auto nStar = oracle.nu_fine(oracle.subdivided_star(A)); nStar && *nStar != *nA)
      report.violations.push_back("star neighborhood: " + names(A) + " has value " +
                                  std::to_string(*nA) + " but its closed star has " +
                                  std::to_string(*nStar));
    if (F) {
      CellSet img = set_intersect(F->image_of(A), oracle.ambient);
      if (auto nImg = oracle.nu(img); nImg && *nA > *nImg)
        report.violations.push_back("image monotonicity: " + names(A) + " has value " +
                                    std::to_string(*nA) + " but its image " + names(img) +
                                    " has " + std::to_string(*nImg));
    }
    if (!oracle.ambient.empty()) {
      CellId c = oracle.ambient[static_cast<std::size_t>(rng() % oracle.ambient.size())];
      if (auto n1 = oracle.nu({c}); n1 && *n1 != 1)
        report.violations.push_back("normalization: single cell " +
                                    oracle.grid.cell_name(c) + " has value " +
                                    std::to_string(*n1));
    }
  }
  return report;
}

}  // namespace cubcat
