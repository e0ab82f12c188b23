#pragma once

// Pointed quotient dynamics: the complement of L in N with one absorbing
// basepoint standing in for all of L and everything outside N.

#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "cubcat/core.hpp"
#include "cubcat/flow.hpp"
#include "cubcat/isolation.hpp"

namespace cubcat {

// Locals 0..n-1 are the interior cells (sorted by id); local n is the
// basepoint. Successor lists are sorted; the basepoint maps to itself.
struct PointedMap {
  const CellMap* F = nullptr;
  CellSet N, L, interior;
  std::vector<std::vector<int>> succ;

  int star() const { return static_cast<int>(interior.size()); }
  int size() const { return static_cast<int>(interior.size()) + 1; }
  CellId cell(int local) const { return interior[static_cast<std::size_t>(local)]; }
  int local_of(CellId c) const {
    auto it = std::lower_bound(interior.begin(), interior.end(), c);
    if (it != interior.end() && *it == c)
      return static_cast<int>(it - interior.begin());
    return -1;
  }
  bool hits_star(int local) const {
    const auto& s = succ[static_cast<std::size_t>(local)];
    return !s.empty() && s.back() == star();
  }

  std::vector<int> image_of(const std::vector<int>& xs) const {
    std::vector<int> out;
    for (int x : xs) {
      const auto& s = succ[static_cast<std::size_t>(x)];
      out.insert(out.end(), s.begin(), s.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  CellSet to_cells(const std::vector<int>& locals) const {
    CellSet out;
    for (int x : locals)
      if (x != star()) out.push_back(cell(x));
    return canon(std::move(out));
  }
  std::vector<int> to_locals(const CellSet& cells) const {
    std::vector<int> out;
    for (CellId c : cells) {
      int l = local_of(c);
      if (l < 0) throw std::invalid_argument("cell is not in the interior of the pair");
      out.push_back(l);
    }
    return out;
  }
};

// Image rule: keep the interior part of the image; add the basepoint exactly
// when the image is not entirely interior.
inline PointedMap make_pointed(const CellMap& F, const CellSet& N, const CellSet& L) {
  PointedMap pm;
  pm.F = &F;
  pm.N = N;
  pm.L = L;
  pm.interior = set_minus(N, L);
  int n = static_cast<int>(pm.interior.size());
  pm.succ.resize(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i < n; ++i) {
    CellId c = pm.cell(i);
    bool to_star = F.exits(c);
    for (CellId d : F.image(c)) {
      int j = pm.local_of(d);
      if (j >= 0)
        pm.succ[static_cast<std::size_t>(i)].push_back(j);
      else
        to_star = true;
    }
    if (to_star) pm.succ[static_cast<std::size_t>(i)].push_back(n);
    auto& s = pm.succ[static_cast<std::size_t>(i)];
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    if (s.empty())
      throw std::logic_error("pointed image is empty; the pair is inconsistent");
  }
  pm.succ[static_cast<std::size_t>(n)].push_back(n);
  return pm;
}

inline PointedMap make_pointed(const CellMap& F, const IndexPair& p) {
  return make_pointed(F, p.N, p.L);
}

// Largest interior subset in which every cell keeps an interior successor.
inline CellSet forward_invariant_part(const PointedMap& pm) {
  int n = static_cast<int>(pm.interior.size());
  std::vector<int> live_succ(static_cast<std::size_t>(n), 0);
  std::vector<std::vector<int>> pred(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j : pm.succ[static_cast<std::size_t>(i)])
      if (j != pm.star()) {
        ++live_succ[static_cast<std::size_t>(i)];
        pred[static_cast<std::size_t>(j)].push_back(i);
      }
  std::vector<std::uint8_t> dead(static_cast<std::size_t>(n), 0);
  std::vector<int> work;
  for (int i = 0; i < n; ++i)
    if (live_succ[static_cast<std::size_t>(i)] == 0) {
      dead[static_cast<std::size_t>(i)] = 1;
      work.push_back(i);
    }
  while (!work.empty()) {
    int i = work.back();
    work.pop_back();
    for (int p : pred[static_cast<std::size_t>(i)])
      if (!dead[static_cast<std::size_t>(p)] &&
          --live_succ[static_cast<std::size_t>(p)] == 0) {
        dead[static_cast<std::size_t>(p)] = 1;
        work.push_back(p);
      }
  }
  CellSet out;
  for (int i = 0; i < n; ++i)
    if (!dead[static_cast<std::size_t>(i)]) out.push_back(pm.cell(i));
  return out;
}

struct NoCollapse {
  CellId witness;  // a cell of A from which interior orbits never die out
};
using CollapseResult = std::variant<int, NoCollapse>;

// Least k with the k-th image of A reduced to the basepoint alone (0 for the
// empty set). Cells meeting the forward invariant part never collapse.
inline CollapseResult collapse_time(const PointedMap& pm, const CellSet& A) {
  if (!subset_of(A, pm.interior))
    throw std::invalid_argument("collapse_time needs A inside the interior of the pair");
  CellSet iplus = forward_invariant_part(pm);
  CellSet clash = set_intersect(A, iplus);
  if (!clash.empty()) return NoCollapse{clash.front()};
  std::vector<int> x = pm.to_locals(A);
  int cap = static_cast<int>(pm.interior.size()) + 2;
  for (int k = 0; k <= cap; ++k) {
    bool only_star = true;
    for (int v : x)
      if (v != pm.star()) {
        only_star = false;
        break;
      }
    if (only_star) return k;  // the empty set collapses at time 0
    x = pm.image_of(x);
  }
  throw std::logic_error("collapse iteration exceeded its bound");
}

// Cells whose k-th pointed image is the basepoint alone. Nondecreasing in k;
// the union over k is the interior minus its forward invariant part.
inline CellSet collapse_basin(const PointedMap& pm, int k) {
  CellSet out;
  for (int i = 0; i < static_cast<int>(pm.interior.size()); ++i) {
    std::vector<int> x{i};
    for (int t = 0; t < k; ++t) x = pm.image_of(x);
    bool only_star = true;
    for (int v : x)
      if (v != pm.star()) {
        only_star = false;
        break;
      }
    if (only_star && k > 0) out.push_back(pm.cell(i));
  }
  return out;
}

}  // namespace cubcat
