#pragma once

// Dense bit-packed linear algebra over GF(2).

#include <bit>
#include <cstdint>
#include <vector>

namespace cubcat::gf2 {

struct Vec {
  int n = 0;
  std::vector<std::uint64_t> w;

  Vec() = default;
  explicit Vec(int n_) : n(n_), w(static_cast<std::size_t>((n_ + 63) / 64), 0) {}

  bool get(int i) const {
    return (w[static_cast<std::size_t>(i) >> 6] >> (i & 63)) & 1ULL;
  }
  void set(int i, bool v) {
    std::uint64_t m = 1ULL << (i & 63);
    if (v)
      w[static_cast<std::size_t>(i) >> 6] |= m;
    else
      w[static_cast<std::size_t>(i) >> 6] &= ~m;
  }
  void flip(int i) { w[static_cast<std::size_t>(i) >> 6] ^= 1ULL << (i & 63); }
  Vec& operator^=(const Vec& o) {
    for (std::size_t k = 0; k < w.size(); ++k) w[k] ^= o.w[k];
    return *this;
  }
  bool zero() const {
    for (auto x : w)
      if (x) return false;
    return true;
  }
  int lowest() const {
    for (std::size_t k = 0; k < w.size(); ++k)
      if (w[k]) return static_cast<int>(k * 64) + std::countr_zero(w[k]);
    return -1;
  }
  int popcount() const {
    int c = 0;
    for (auto x : w) c += std::popcount(x);
    return c;
  }
  bool operator==(const Vec&) const = default;
};

struct Mat {
  int rows = 0, cols = 0;
  std::vector<Vec> r;

  Mat() = default;
  Mat(int nr, int nc) : rows(nr), cols(nc), r(static_cast<std::size_t>(nr), Vec(nc)) {}
  bool get(int i, int j) const { return r[static_cast<std::size_t>(i)].get(j); }
  void set(int i, int j, bool v) { r[static_cast<std::size_t>(i)].set(j, v); }
  void flip(int i, int j) { r[static_cast<std::size_t>(i)].flip(j); }
};

// Incremental row space with one pivot column per stored row.
struct Echelon {
  int cols = 0;
  std::vector<Vec> rows;
  std::vector<int> pivots;

  explicit Echelon(int c) : cols(c) {}

  Vec reduce(Vec v) const {
    for (std::size_t k = 0; k < rows.size(); ++k)
      if (v.get(pivots[k])) v ^= rows[k];
    return v;
  }
  // True when v was independent of the rows seen so far.
  bool add(Vec v) {
    v = reduce(std::move(v));
    int p = v.lowest();
    if (p < 0) return false;
    rows.push_back(std::move(v));
    pivots.push_back(p);
    return true;
  }
  bool contains(const Vec& v) const { return reduce(v).zero(); }
  int rank() const { return static_cast<int>(rows.size()); }
};

inline int rank_of(const Mat& m) {
  Echelon e(m.cols);
  for (const auto& row : m.r) e.add(row);
  return e.rank();
}

// Basis of the right kernel {x : m x = 0}; vectors have length m.cols.
inline std::vector<Vec> kernel_basis(const Mat& m) {
  std::vector<Vec> rows = m.r;
  std::vector<int> pivot_col;
  std::size_t rr = 0;
  for (int c = 0; c < m.cols && rr < rows.size(); ++c) {
    std::size_t p = rr;
    while (p < rows.size() && !rows[p].get(c)) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[rr], rows[p]);
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (i != rr && rows[i].get(c)) rows[i] ^= rows[rr];
    pivot_col.push_back(c);
    ++rr;
  }
  std::vector<bool> is_pivot(static_cast<std::size_t>(m.cols), false);
  for (int c : pivot_col) is_pivot[static_cast<std::size_t>(c)] = true;
  std::vector<Vec> basis;
  for (int c = 0; c < m.cols; ++c) {
    if (is_pivot[static_cast<std::size_t>(c)]) continue;
    Vec v(m.cols);
    v.set(c, true);
    for (std::size_t k = 0; k < pivot_col.size(); ++k)
      if (rows[k].get(c)) v.set(pivot_col[k], true);
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace cubcat::gf2
