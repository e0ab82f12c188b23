#pragma once

// Multivalued cell maps: geometric enclosure of a one-step flow, and
// explicitly listed images.

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cubcat/core.hpp"
#include "cubcat/expr.hpp"

namespace cubcat {

struct MapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Total multivalued map on a grid. image(c) lists in-grid cells; exits(c)
// is set when part of the image leaves the grid on a bounded axis.
struct CellMap {
  Grid grid;
  std::vector<CellSet> images;
  std::vector<std::uint8_t> exterior;
  double tau = 0;
  double padding = 0;

  const CellSet& image(CellId c) const {
    return images[static_cast<std::size_t>(c)];
  }
  bool exits(CellId c) const { return exterior[static_cast<std::size_t>(c)] != 0; }

  CellSet image_of(const CellSet& s) const {
    CellSet out;
    for (CellId c : s)
      out.insert(out.end(), image(c).begin(), image(c).end());
    return canon(std::move(out));
  }
};

inline Grid build_grid(const std::vector<double>& lo, const std::vector<double>& hi,
                       const std::vector<int>& counts,
                       const std::vector<std::uint8_t>& periodic) {
  return Grid::make(lo, hi, counts, periodic, 2);
}

// One classical fourth-order step of size tau.
inline void rk4_step(const VectorField& f, double tau, const double* x, double* out) {
  int d = f.dim;
  std::vector<double> k1(d), k2(d), k3(d), k4(d), tmp(d);
  f.eval(x, k1.data());
  for (int a = 0; a < d; ++a) tmp[a] = x[a] + 0.5 * tau * k1[a];
  f.eval(tmp.data(), k2.data());
  for (int a = 0; a < d; ++a) tmp[a] = x[a] + 0.5 * tau * k2[a];
  f.eval(tmp.data(), k3.data());
  for (int a = 0; a < d; ++a) tmp[a] = x[a] + tau * k3[a];
  f.eval(tmp.data(), k4.data());
  for (int a = 0; a < d; ++a)
    out[a] = x[a] + tau / 6.0 * (k1[a] + 2 * k2[a] + 2 * k3[a] + k4[a]);
}

namespace detail {

// Grid-line snapping for interval-to-cell location, in units of cell width.
inline constexpr double kLocateTol = 1e-9;

// Cells intersecting [blo, bhi] along one axis. Returns false when the
// interval misses a bounded axis entirely; ext is set when it overhangs one.
inline bool locate_axis(const Grid& g, int a, double blo, double bhi,
                        std::vector<int>& out, bool& ext) {
  double h = g.width(a);
  double u = (blo - g.lo[a]) / h;
  double v = (bhi - g.lo[a]) / h;
  double ur = std::round(u), vr = std::round(v);
  long long kmin = (std::abs(u - ur) <= kLocateTol)
                       ? static_cast<long long>(ur)
                       : static_cast<long long>(std::floor(u));
  long long kmax = (std::abs(v - vr) <= kLocateTol)
                       ? static_cast<long long>(vr) - 1
                       : static_cast<long long>(std::floor(v));
  if (kmax < kmin) kmax = kmin;  // degenerate sliver on a grid line keeps one cell
  out.clear();
  long long n = g.counts[a];
  if (g.periodic[a]) {
    if (kmax - kmin + 1 >= n) {
      for (long long k = 0; k < n; ++k) out.push_back(static_cast<int>(k));
      return true;
    }
    for (long long k = kmin; k <= kmax; ++k) {
      long long kk = k % n;
      if (kk < 0) kk += n;
      out.push_back(static_cast<int>(kk));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return true;
  }
  if (kmin < 0 || kmax >= n) ext = true;
  long long c0 = std::max(kmin, 0LL), c1 = std::min(kmax, n - 1);
  if (c0 > c1) return false;
  for (long long k = c0; k <= c1; ++k) out.push_back(static_cast<int>(k));
  return true;
}

}  // namespace detail

// Image of each cell: all cells meeting the padded bounding box of the flowed
// sample points (cell corners plus face midpoints).
inline CellMap enclose_flow_map(const VectorField& f, const Grid& g, double tau,
                                double padding) {
  if (!(tau > 0)) throw MapError("tau must be positive");
  if (!(padding >= 0)) throw MapError("padding must be nonnegative");
  if (f.dim != g.dim) throw MapError("field dimension does not match the grid");
  int d = g.dim;
  CellMap F;
  F.grid = g;
  F.tau = tau;
  F.padding = padding;
  F.images.resize(static_cast<std::size_t>(g.size()));
  F.exterior.assign(static_cast<std::size_t>(g.size()), 0);

  std::vector<double> x(d), y(d), blo(d), bhi(d);
  std::vector<std::vector<int>> axis_cells(static_cast<std::size_t>(d));
  std::vector<double> clo(d), chi(d);

  for (CellId c = 0; c < g.size(); ++c) {
    auto m = g.multi(c);
    for (int a = 0; a < d; ++a) {
      clo[a] = g.lo[a] + g.width(a) * m[a];
      chi[a] = clo[a] + g.width(a);
    }
    bool first = true;
    auto take = [&](const double* pt) {
      rk4_step(f, tau, pt, y.data());
      for (int a = 0; a < d; ++a) {
        if (!std::isfinite(y[a]))
          throw MapError("field evaluation produced a non-finite value near cell " +
                         g.cell_name(c));
        if (first || y[a] < blo[a]) blo[a] = y[a];
        if (first || y[a] > bhi[a]) bhi[a] = y[a];
        blo[a] = std::min(blo[a], y[a]);
        bhi[a] = std::max(bhi[a], y[a]);
      }
      first = false;
    };
    // corners
    for (int k = 0; k < (1 << d); ++k) {
      for (int a = 0; a < d; ++a) x[a] = (k >> a) & 1 ? chi[a] : clo[a];
      take(x.data());
    }
    // face midpoints
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) x[b] = 0.5 * (clo[b] + chi[b]);
      x[a] = clo[a];
      take(x.data());
      x[a] = chi[a];
      take(x.data());
    }
    bool ext = false;
    bool empty = false;
    for (int a = 0; a < d; ++a) {
      if (!detail::locate_axis(g, a, blo[a] - padding, bhi[a] + padding,
                               axis_cells[static_cast<std::size_t>(a)], ext)) {
        empty = true;
      }
    }
    CellSet img;
    if (!empty) {
      std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
      std::vector<int> mm(static_cast<std::size_t>(d));
      for (;;) {
        for (int a = 0; a < d; ++a)
          mm[static_cast<std::size_t>(a)] =
              axis_cells[static_cast<std::size_t>(a)][idx[static_cast<std::size_t>(a)]];
        img.push_back(g.id(mm));
        int a = 0;
        while (a < d) {
          if (++idx[static_cast<std::size_t>(a)] <
              axis_cells[static_cast<std::size_t>(a)].size())
            break;
          idx[static_cast<std::size_t>(a)] = 0;
          ++a;
        }
        if (a == d) break;
      }
    }
    img = canon(std::move(img));
    if (img.empty() && !ext)
      throw MapError("empty image with nonnegative padding at cell " + g.cell_name(c));
    F.images[static_cast<std::size_t>(c)] = std::move(img);
    F.exterior[static_cast<std::size_t>(c)] = ext ? 1 : 0;
  }
  return F;
}

struct ExplicitImage {
  CellSet cells;
  bool exterior = false;
};

// Builds a map from one explicitly listed image per cell.
inline CellMap explicit_map(const Grid& g,
                            const std::vector<std::pair<CellId, ExplicitImage>>& entries) {
  CellMap F;
  F.grid = g;
  F.images.resize(static_cast<std::size_t>(g.size()));
  F.exterior.assign(static_cast<std::size_t>(g.size()), 0);
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(g.size()), 0);
  for (const auto& [c, im] : entries) {
    if (c < 0 || c >= g.size())
      throw MapError("image listed for a cell outside the grid");
    if (seen[static_cast<std::size_t>(c)])
      throw MapError("duplicate image for cell " + g.cell_name(c));
    seen[static_cast<std::size_t>(c)] = 1;
    if (im.cells.empty() && !im.exterior)
      throw MapError("empty image for cell " + g.cell_name(c));
    for (CellId t : im.cells)
      if (t < 0 || t >= g.size())
        throw MapError("image of cell " + g.cell_name(c) +
                       " lists a cell outside the grid");
    F.images[static_cast<std::size_t>(c)] = canon(im.cells);
    F.exterior[static_cast<std::size_t>(c)] = im.exterior ? 1 : 0;
  }
  for (CellId c = 0; c < g.size(); ++c)
    if (!seen[static_cast<std::size_t>(c)])
      throw MapError("missing image for cell " + g.cell_name(c));
  return F;
}

}  // namespace cubcat
