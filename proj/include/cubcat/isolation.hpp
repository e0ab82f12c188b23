#pragma once

// Maximal invariant sets and index pair construction.

#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cubcat/core.hpp"
#include "cubcat/flow.hpp"

namespace cubcat {

// A map restricted to a sorted cell set, with local adjacency lists.
struct Restriction {
  CellSet verts;
  std::vector<std::vector<int>> succ, pred;

  static Restriction make(const CellMap& F, const CellSet& S) {
    Restriction r;
    r.verts = S;
    int n = static_cast<int>(S.size());
    r.succ.resize(static_cast<std::size_t>(n));
    r.pred.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      for (CellId d : F.image(S[static_cast<std::size_t>(i)])) {
        auto it = std::lower_bound(S.begin(), S.end(), d);
        if (it != S.end() && *it == d) {
          int j = static_cast<int>(it - S.begin());
          r.succ[static_cast<std::size_t>(i)].push_back(j);
          r.pred[static_cast<std::size_t>(j)].push_back(i);
        }
      }
    }
    return r;
  }

  int local(CellId c) const {
    auto it = std::lower_bound(verts.begin(), verts.end(), c);
    if (it != verts.end() && *it == c) return static_cast<int>(it - verts.begin());
    return -1;
  }
};

// Strongly connected components, iterative Tarjan. Components are emitted
// successors-first: every component appears after all components it reaches.
inline std::vector<std::vector<int>> scc_components(
    const std::vector<std::vector<int>>& succ) {
  int n = static_cast<int>(succ.size());
  std::vector<int> index(static_cast<std::size_t>(n), -1),
      low(static_cast<std::size_t>(n), 0);
  std::vector<std::uint8_t> on_stack(static_cast<std::size_t>(n), 0);
  std::vector<int> stack;
  std::vector<std::vector<int>> comps;
  int counter = 0;

  struct Frame {
    int v;
    std::size_t child;
  };
  std::vector<Frame> call;
  for (int s = 0; s < n; ++s) {
    if (index[static_cast<std::size_t>(s)] != -1) continue;
    call.push_back({s, 0});
    index[static_cast<std::size_t>(s)] = low[static_cast<std::size_t>(s)] = counter++;
    stack.push_back(s);
    on_stack[static_cast<std::size_t>(s)] = 1;
    while (!call.empty()) {
      Frame& f = call.back();
      int v = f.v;
      if (f.child < succ[static_cast<std::size_t>(v)].size()) {
        int w = succ[static_cast<std::size_t>(v)][f.child++];
        if (index[static_cast<std::size_t>(w)] == -1) {
          call.push_back({w, 0});
          index[static_cast<std::size_t>(w)] = low[static_cast<std::size_t>(w)] =
              counter++;
          stack.push_back(w);
          on_stack[static_cast<std::size_t>(w)] = 1;
        } else if (on_stack[static_cast<std::size_t>(w)]) {
          low[static_cast<std::size_t>(v)] =
              std::min(low[static_cast<std::size_t>(v)],
                       index[static_cast<std::size_t>(w)]);
        }
      } else {
        if (low[static_cast<std::size_t>(v)] == index[static_cast<std::size_t>(v)]) {
          std::vector<int> comp;
          for (;;) {
            int w = stack.back();
            stack.pop_back();
            on_stack[static_cast<std::size_t>(w)] = 0;
            comp.push_back(w);
            if (w == v) break;
          }
          std::sort(comp.begin(), comp.end());
          comps.push_back(std::move(comp));
        }
        call.pop_back();
        if (!call.empty()) {
          int p = call.back().v;
          low[static_cast<std::size_t>(p)] = std::min(
              low[static_cast<std::size_t>(p)], low[static_cast<std::size_t>(v)]);
        }
      }
    }
  }
  return comps;
}

// Largest subset of S in which every cell keeps both a successor and a
// predecessor inside the subset: alternating removal until a fixpoint.
inline CellSet invariant_part(const CellMap& F, const CellSet& S) {
  Restriction r = Restriction::make(F, S);
  int n = static_cast<int>(S.size());
  std::vector<int> nsucc(static_cast<std::size_t>(n)), npred(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    nsucc[static_cast<std::size_t>(i)] = static_cast<int>(r.succ[static_cast<std::size_t>(i)].size());
    npred[static_cast<std::size_t>(i)] = static_cast<int>(r.pred[static_cast<std::size_t>(i)].size());
  }
  std::vector<std::uint8_t> dead(static_cast<std::size_t>(n), 0);
  std::deque<int> work;
  for (int i = 0; i < n; ++i)
    if (nsucc[static_cast<std::size_t>(i)] == 0 || npred[static_cast<std::size_t>(i)] == 0) {
      dead[static_cast<std::size_t>(i)] = 1;
      work.push_back(i);
    }
  while (!work.empty()) {
    int i = work.front();
    work.pop_front();
    for (int j : r.succ[static_cast<std::size_t>(i)])
      if (!dead[static_cast<std::size_t>(j)] &&
          --npred[static_cast<std::size_t>(j)] == 0) {
        dead[static_cast<std::size_t>(j)] = 1;
        work.push_back(j);
      }
    for (int j : r.pred[static_cast<std::size_t>(i)])
      if (!dead[static_cast<std::size_t>(j)] &&
          --nsucc[static_cast<std::size_t>(j)] == 0) {
        dead[static_cast<std::size_t>(j)] = 1;
        work.push_back(j);
      }
  }
  CellSet out;
  for (int i = 0; i < n; ++i)
    if (!dead[static_cast<std::size_t>(i)]) out.push_back(S[static_cast<std::size_t>(i)]);
  return out;
}

struct ValidationReport {
  bool positive_invariance = true;
  bool exit_through_L = true;
  bool isolation = true;
  std::optional<CellId> pi_witness, exit_witness, iso_witness;
  bool all() const { return positive_invariance && exit_through_L && isolation; }
};

struct IndexPair {
  CellSet S, A, N, L;
  CellSet interior() const { return set_minus(N, L); }
};

struct NotIsolating : std::runtime_error {
  CellSet witness;
  NotIsolating(const std::string& msg, CellSet w)
      : std::runtime_error(msg), witness(std::move(w)) {}
};

// The interior N\L must trap its own dynamics: nothing invariant may sit in
// the one-ring around it without being inside it.
inline bool isolation_check(const CellMap& F, const CellSet& interior,
                            std::optional<CellId>* witness = nullptr) {
  CellSet collar = one_ring(F.grid, interior);
  CellSet inv = invariant_part(F, collar);
  CellSet outside = set_minus(inv, interior);
  if (outside.empty()) return true;
  if (witness) *witness = outside.front();
  return false;
}

inline ValidationReport validate_index_pair(const CellMap& F, const CellSet& N,
                                            const CellSet& L) {
  if (!subset_of(L, N)) throw std::invalid_argument("L must be a subset of N");
  ValidationReport rep;
  for (CellId c : L) {
    for (CellId d : F.image(c)) {
      if (set_contains(N, d) && !set_contains(L, d)) {
        rep.positive_invariance = false;
        rep.pi_witness = c;
        break;
      }
    }
    if (!rep.positive_invariance) break;
  }
  CellSet interior = set_minus(N, L);
  for (CellId c : interior) {
    bool bad = F.exits(c);
    if (!bad)
      for (CellId d : F.image(c))
        if (!set_contains(N, d)) {
          bad = true;
          break;
        }
    if (bad) {
      rep.exit_through_L = false;
      rep.exit_witness = c;
      break;
    }
  }
  rep.isolation = isolation_check(F, interior, &rep.iso_witness);
  return rep;
}

// Builds (N, L) around the maximal invariant subset A of S. N is the forward
// closure of A within S; L collects the cells of N that can leave N, closed
// up under forward images inside N.
inline IndexPair build_index_pair(const CellMap& F, const CellSet& S) {
  IndexPair p;
  p.S = S;
  p.A = invariant_part(F, S);
  std::vector<std::uint8_t> in_n(static_cast<std::size_t>(F.grid.size()), 0);
  std::deque<CellId> work;
  for (CellId c : p.A) {
    in_n[static_cast<std::size_t>(c)] = 1;
    work.push_back(c);
  }
  while (!work.empty()) {
    CellId c = work.front();
    work.pop_front();
    for (CellId d : F.image(c)) {
      if (!set_contains(S, d)) continue;
      if (!in_n[static_cast<std::size_t>(d)]) {
        in_n[static_cast<std::size_t>(d)] = 1;
        work.push_back(d);
      }
    }
  }
  for (CellId c = 0; c < F.grid.size(); ++c)
    if (in_n[static_cast<std::size_t>(c)]) p.N.push_back(c);

  std::vector<std::uint8_t> in_l(static_cast<std::size_t>(F.grid.size()), 0);
  for (CellId c : p.N) {
    bool exits = F.exits(c);
    if (!exits)
      for (CellId d : F.image(c))
        if (!in_n[static_cast<std::size_t>(d)]) {
          exits = true;
          break;
        }
    if (exits) {
      in_l[static_cast<std::size_t>(c)] = 1;
      work.push_back(c);
    }
  }
  while (!work.empty()) {
    CellId c = work.front();
    work.pop_front();
    for (CellId d : F.image(c)) {
      if (d < 0 || d >= F.grid.size()) continue;
      if (in_n[static_cast<std::size_t>(d)] && !in_l[static_cast<std::size_t>(d)]) {
        in_l[static_cast<std::size_t>(d)] = 1;
        work.push_back(d);
      }
    }
  }
  for (CellId c : p.N)
    if (in_l[static_cast<std::size_t>(c)]) p.L.push_back(c);

  CellSet clash = set_intersect(p.L, p.A);
  if (!clash.empty())
    throw NotIsolating(
        "the invariant set of S reaches the boundary; no index pair exists",
        clash);
  std::optional<CellId> w;
  if (!isolation_check(F, p.interior(), &w))
    throw NotIsolating(
        "invariant cells sit against the interior of the pair; S does not isolate",
        CellSet{*w});
  return p;
}

}  // namespace cubcat
