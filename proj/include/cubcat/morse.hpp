#pragma once

// Recurrent decomposition of the interior dynamics: Morse sets, admissible
// order, attractor filtration, and confinement times.

#include <map>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "cubcat/core.hpp"
#include "cubcat/isolation.hpp"
#include "cubcat/quotient.hpp"

namespace cubcat {

struct MorseDecomposition {
  std::vector<CellSet> sets;          // admissible order, most attracting first
  std::vector<std::vector<int>> dag;  // dag[j] lists i<j reachable from set j (covers only)
  CellSet recurrent;                  // union of the Morse sets
  CellSet iplus;                      // forward invariant part of the interior
  std::vector<CellSet> filtration;    // filtration[j] traps the first j+1 sets

  int count() const { return static_cast<int>(sets.size()); }
};

namespace detail {

// Interior-to-interior adjacency of the pointed map restricted to a sorted
// local subset; indices refer to positions in `subset`.
inline std::vector<std::vector<int>> restricted_succ(const PointedMap& pm,
                                                     const std::vector<int>& subset) {
  std::vector<int> pos(static_cast<std::size_t>(pm.size()), -1);
  for (std::size_t i = 0; i < subset.size(); ++i)
    pos[static_cast<std::size_t>(subset[i])] = static_cast<int>(i);
  std::vector<std::vector<int>> out(subset.size());
  for (std::size_t i = 0; i < subset.size(); ++i)
    for (int j : pm.succ[static_cast<std::size_t>(subset[i])])
      if (j != pm.star() && pos[static_cast<std::size_t>(j)] >= 0)
        out[i].push_back(pos[static_cast<std::size_t>(j)]);
  return out;
}

}  // namespace detail

// Morse sets are the recurrent strongly connected pieces of the dynamics on
// the maximal invariant subset of the interior; singletons only count when
// self-looped. Ordered most-attracting first, ties by smallest first cell.
inline MorseDecomposition morse_sets(const PointedMap& pm) {
  MorseDecomposition md;
  md.iplus = forward_invariant_part(pm);

  // Maximal invariant set of the interior under the map itself.
  CellSet inv = invariant_part(*pm.F, pm.interior);
  std::vector<int> inv_local = pm.to_locals(inv);
  auto succ = detail::restricted_succ(pm, inv_local);
  auto comps = scc_components(succ);

  // Keep recurrent components.
  std::vector<std::vector<int>> kept;  // local indices within inv_local
  for (auto& comp : comps) {
    bool recurrent = comp.size() > 1;
    if (!recurrent && !comp.empty()) {
      int v = comp[0];
      for (int w : succ[static_cast<std::size_t>(v)])
        if (w == v) recurrent = true;
    }
    if (recurrent) kept.push_back(comp);
  }

  // Reachability between kept components through the invariant-set digraph.
  int m = static_cast<int>(kept.size());
  std::vector<int> comp_of(inv_local.size(), -1);
  for (int k = 0; k < m; ++k)
    for (int v : kept[static_cast<std::size_t>(k)])
      comp_of[static_cast<std::size_t>(v)] = k;
  std::vector<std::vector<std::uint8_t>> reach(
      static_cast<std::size_t>(m),
      std::vector<std::uint8_t>(static_cast<std::size_t>(m), 0));
  for (int k = 0; k < m; ++k) {
    std::vector<std::uint8_t> seen(inv_local.size(), 0);
    std::queue<int> q;
    for (int v : kept[static_cast<std::size_t>(k)]) {
      seen[static_cast<std::size_t>(v)] = 1;
      q.push(v);
    }
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (int w : succ[static_cast<std::size_t>(v)])
        if (!seen[static_cast<std::size_t>(w)]) {
          seen[static_cast<std::size_t>(w)] = 1;
          q.push(w);
        }
    }
    for (std::size_t v = 0; v < inv_local.size(); ++v)
      if (seen[v] && comp_of[v] >= 0) reach[static_cast<std::size_t>(k)][static_cast<std::size_t>(comp_of[v])] = 1;
  }

  // Admissible order: repeatedly emit a component that reaches no unplaced
  // component; ties go to the smallest leading cell id.
  auto lead_cell = [&](int k) {
    CellId best = -1;
    for (int v : kept[static_cast<std::size_t>(k)]) {
      CellId c = pm.cell(inv_local[static_cast<std::size_t>(v)]);
      if (best < 0 || c < best) best = c;
    }
    return best;
  };
  std::vector<int> order;
  std::vector<std::uint8_t> placed(static_cast<std::size_t>(m), 0);
  for (int step = 0; step < m; ++step) {
    int pick = -1;
    CellId pick_lead = -1;
    for (int k = 0; k < m; ++k) {
      if (placed[static_cast<std::size_t>(k)]) continue;
      bool ready = true;
      for (int j = 0; j < m; ++j)
        if (j != k && !placed[static_cast<std::size_t>(j)] &&
            reach[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)]) {
          ready = false;
          break;
        }
      if (!ready) continue;
      CellId lead = lead_cell(k);
      if (pick < 0 || lead < pick_lead) {
        pick = k;
        pick_lead = lead;
      }
    }
    if (pick < 0) throw std::logic_error("component order is not acyclic");
    placed[static_cast<std::size_t>(pick)] = 1;
    order.push_back(pick);
  }

  std::vector<int> rank(static_cast<std::size_t>(m), 0);
  for (int j = 0; j < m; ++j)
    rank[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])] = j;
  for (int j = 0; j < m; ++j) {
    int k = order[static_cast<std::size_t>(j)];
    CellSet cells;
    for (int v : kept[static_cast<std::size_t>(k)])
      cells.push_back(pm.cell(inv_local[static_cast<std::size_t>(v)]));
    md.sets.push_back(canon(std::move(cells)));
  }
  md.recurrent.clear();
  for (const auto& s : md.sets) md.recurrent = set_union(md.recurrent, s);

  // Cover edges of the reachability order, from later (repelling) sets to
  // earlier ones, transitively reduced.
  md.dag.resize(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    int kj = order[static_cast<std::size_t>(j)];
    for (int i = 0; i < j; ++i) {
      int ki = order[static_cast<std::size_t>(i)];
      if (!reach[static_cast<std::size_t>(kj)][static_cast<std::size_t>(ki)]) continue;
      bool direct = true;
      for (int t = 0; t < m && direct; ++t) {
        if (t == ki || t == kj) continue;
        if (reach[static_cast<std::size_t>(kj)][static_cast<std::size_t>(t)] &&
            reach[static_cast<std::size_t>(t)][static_cast<std::size_t>(ki)] &&
            rank[static_cast<std::size_t>(t)] > i && rank[static_cast<std::size_t>(t)] < j)
          direct = false;
      }
      if (direct) md.dag[static_cast<std::size_t>(j)].push_back(i);
    }
  }

  // Attractor filtration: stage j keeps the cells with no escape to a later
  // Morse set inside the forward invariant part.
  std::vector<int> ip_local = pm.to_locals(md.iplus);
  auto ip_succ = detail::restricted_succ(pm, ip_local);
  int n_ip = static_cast<int>(ip_local.size());
  std::vector<std::vector<int>> ip_pred(static_cast<std::size_t>(n_ip));
  for (int v = 0; v < n_ip; ++v)
    for (int w : ip_succ[static_cast<std::size_t>(v)])
      ip_pred[static_cast<std::size_t>(w)].push_back(v);
  std::vector<int> ip_pos(static_cast<std::size_t>(pm.size()), -1);
  for (int v = 0; v < n_ip; ++v)
    ip_pos[static_cast<std::size_t>(ip_local[static_cast<std::size_t>(v)])] = v;

  md.filtration.resize(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    // Cells reaching any Morse set later than stage j.
    std::vector<std::uint8_t> reaches_later(static_cast<std::size_t>(n_ip), 0);
    std::queue<int> q;
    for (int t = j + 1; t < m; ++t)
      for (CellId c : md.sets[static_cast<std::size_t>(t)]) {
        int v = ip_pos[static_cast<std::size_t>(pm.local_of(c))];
        if (v >= 0 && !reaches_later[static_cast<std::size_t>(v)]) {
          reaches_later[static_cast<std::size_t>(v)] = 1;
          q.push(v);
        }
      }
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (int w : ip_pred[static_cast<std::size_t>(v)])
        if (!reaches_later[static_cast<std::size_t>(w)]) {
          reaches_later[static_cast<std::size_t>(w)] = 1;
          q.push(w);
        }
    }
    CellSet stage;
    for (int v = 0; v < n_ip; ++v)
      if (!reaches_later[static_cast<std::size_t>(v)])
        stage.push_back(pm.cell(ip_local[static_cast<std::size_t>(v)]));
    md.filtration[static_cast<std::size_t>(j)] = canon(std::move(stage));
  }
  return md;
}

struct NoConfinement {
  CellId witness;  // a recurrently visited cell outside U
};
using ConfinementResult = std::variant<int, NoConfinement>;

// Least T such that from time T on, the forward images of A meet the forward
// invariant part only inside U. Certified by running the set iteration until
// its eventual cycle repeats.
inline ConfinementResult confinement_time(const PointedMap& pm,
                                          const MorseDecomposition& md,
                                          const CellSet& A, int j, const CellSet& U) {
  if (j < 1 || j > md.count())
    throw std::out_of_range("morse set index out of range");
  const CellSet& stage = md.filtration[static_cast<std::size_t>(j - 1)];
  CellSet allowed = (j >= 2)
                        ? set_minus(stage, md.filtration[static_cast<std::size_t>(j - 2)])
                        : stage;
  CellSet bad = set_minus(A, allowed);
  if (!bad.empty())
    throw std::invalid_argument("cell " + pm.F->grid.cell_name(bad.front()) +
                                " lies outside filtration stage " + std::to_string(j));
  if (!subset_of(md.sets[static_cast<std::size_t>(j - 1)], U))
    throw std::invalid_argument("U must contain the Morse set it confines");

  auto violation = [&](const std::vector<int>& xs) -> std::optional<CellId> {
    for (int v : xs) {
      if (v == pm.star()) continue;
      CellId c = pm.cell(v);
      if (set_contains(md.iplus, c) && !set_contains(U, c)) return c;
    }
    return std::nullopt;
  };

  std::vector<std::vector<int>> traj{pm.to_locals(A)};
  std::map<std::vector<int>, int> seen{{traj[0], 0}};
  for (;;) {
    std::vector<int> next = pm.image_of(traj.back());
    auto it = seen.find(next);
    if (it != seen.end()) {
      int cycle_start = it->second;
      for (int t = cycle_start; t < static_cast<int>(traj.size()); ++t)
        if (auto w = violation(traj[static_cast<std::size_t>(t)]))
          return NoConfinement{*w};
      int T = cycle_start;
      for (int t = cycle_start - 1; t >= 0; --t) {
        if (violation(traj[static_cast<std::size_t>(t)])) break;
        T = t;
      }
      return T;
    }
    seen.emplace(next, static_cast<int>(traj.size()));
    traj.push_back(std::move(next));
    if (traj.size() > 100000) throw std::logic_error("confinement iteration exceeded its bound");
  }
}

}  // namespace cubcat
