#pragma once

// Uniform rectangular grids of top-dimensional cells and sorted cell-id sets.
// Cell ids are linear indices, axis 0 fastest.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cubcat {

using CellId = std::int32_t;
using CellSet = std::vector<CellId>;  // always sorted and unique

struct GridError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Grid {
  int dim = 0;
  std::vector<double> lo, hi;
  std::vector<int> counts;
  std::vector<std::uint8_t> periodic;
  std::vector<CellId> strides;

  // min_count is 2 for sampled flow maps, 1 for explicitly listed maps.
  static Grid make(std::vector<double> lo_, std::vector<double> hi_,
                   std::vector<int> counts_, std::vector<std::uint8_t> periodic_,
                   int min_count) {
    Grid g;
    g.dim = static_cast<int>(counts_.size());
    if (g.dim == 0) throw GridError("grid needs at least one axis");
    if (lo_.size() != counts_.size() || hi_.size() != counts_.size() ||
        periodic_.size() != counts_.size())
      throw GridError("grid parameter arrays must share one length");
    long long total = 1;
    for (int a = 0; a < g.dim; ++a) {
      if (!(hi_[a] - lo_[a] > 0.0))
        throw GridError("axis " + std::to_string(a + 1) +
                        ": box interval must have positive length");
      if (counts_[a] < min_count)
        throw GridError("axis " + std::to_string(a + 1) + ": need at least " +
                        std::to_string(min_count) + " subdivisions");
      total *= counts_[a];
      if (total > (1LL << 22)) throw GridError("grid too large");
    }
    g.lo = std::move(lo_);
    g.hi = std::move(hi_);
    g.counts = std::move(counts_);
    g.periodic = std::move(periodic_);
    g.strides.resize(g.dim);
    CellId s = 1;
    for (int a = 0; a < g.dim; ++a) {
      g.strides[a] = s;
      s *= g.counts[a];
    }
    return g;
  }

  CellId size() const {
    CellId s = 1;
    for (int c : counts) s *= c;
    return s;
  }
  double width(int a) const { return (hi[a] - lo[a]) / counts[a]; }

  std::vector<int> multi(CellId c) const {
    std::vector<int> m(dim);
    for (int a = 0; a < dim; ++a) {
      m[a] = static_cast<int>(c % counts[a]);
      c /= counts[a];
    }
    return m;
  }
  CellId id(const std::vector<int>& m) const {
    CellId c = 0;
    for (int a = 0; a < dim; ++a) c += strides[a] * m[a];
    return c;
  }

  // Folds index i into range on a periodic axis; false when it falls off a
  // bounded axis.
  bool fold(int a, long long& i) const {
    if (periodic[a]) {
      long long n = counts[a];
      i %= n;
      if (i < 0) i += n;
      return true;
    }
    return i >= 0 && i < counts[a];
  }

  std::string cell_name(CellId c) const {
    auto m = multi(c);
    std::string s = "(";
    for (int a = 0; a < dim; ++a) {
      if (a) s += ",";
      s += std::to_string(m[a]);
    }
    return s + ")";
  }

  // Chebyshev distance between cells, wrap-aware per axis.
  int cheb_dist(CellId x, CellId y) const {
    auto mx = multi(x), my = multi(y);
    int d = 0;
    for (int a = 0; a < dim; ++a) {
      int da = std::abs(mx[a] - my[a]);
      if (periodic[a]) da = std::min(da, counts[a] - da);
      d = std::max(d, da);
    }
    return d;
  }
};

inline CellSet canon(CellSet s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

inline bool set_contains(const CellSet& s, CellId c) {
  return std::binary_search(s.begin(), s.end(), c);
}
inline CellSet set_union(const CellSet& a, const CellSet& b) {
  CellSet r;
  r.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
  return r;
}
inline CellSet set_intersect(const CellSet& a, const CellSet& b) {
  CellSet r;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(r));
  return r;
}
inline CellSet set_minus(const CellSet& a, const CellSet& b) {
  CellSet r;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(r));
  return r;
}
inline bool subset_of(const CellSet& a, const CellSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

inline CellSet all_cells(const Grid& g) {
  CellSet s(static_cast<std::size_t>(g.size()));
  for (CellId c = 0; c < g.size(); ++c) s[static_cast<std::size_t>(c)] = c;
  return s;
}

// Closed Chebyshev 1-ball around a set: the set plus every grid cell touching
// it, wrapped on periodic axes, clipped on bounded ones.
inline CellSet one_ring(const Grid& g, const CellSet& s) {
  CellSet out;
  std::vector<int> n(g.dim);
  int combos = 1;
  for (int a = 0; a < g.dim; ++a) combos *= 3;
  for (CellId c : s) {
    auto m = g.multi(c);
    for (int k = 0; k < combos; ++k) {
      int kk = k;
      bool ok = true;
      for (int a = 0; a < g.dim; ++a) {
        int off = kk % 3 - 1;
        kk /= 3;
        long long i = static_cast<long long>(m[a]) + off;
        if (!g.fold(a, i)) {
          ok = false;
          break;
        }
        n[a] = static_cast<int>(i);
      }
      if (ok) out.push_back(g.id(n));
    }
  }
  return canon(std::move(out));
}

inline CellSet k_ring(const Grid& g, CellSet s, int k) {
  for (int i = 0; i < k; ++i) s = one_ring(g, s);
  return s;
}

inline int cheb_diameter(const Grid& g, const CellSet& s) {
  int d = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j)
      d = std::max(d, g.cheb_dist(s[i], s[j]));
  return d;
}

}  // namespace cubcat
