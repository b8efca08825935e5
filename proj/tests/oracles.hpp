#pragma once

// Reference computations used only to check the library. They are written
// for clarity rather than speed and share no code with src/.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

namespace oracle {

using Dense = std::vector<std::vector<double>>;

struct Eigen {
  std::vector<double> values;  // descending
  Dense vectors;               // vectors[i] is the eigenvector of values[i]
};

// Classical Jacobi: every step annihilates the largest off-diagonal entry.
inline Eigen classical_jacobi(Dense a) {
  const std::size_t n = a.size();
  Dense v(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;
  for (int step = 0; step < 100000; ++step) {
    std::size_t p = 0, q = 1;
    double big = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (std::abs(a[i][j]) > big) big = std::abs(a[i][j]), p = i, q = j;
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(a[i][i]));
    if (big <= 1e-300 || big <= 1e-18 * scale) break;
    const double phi = 0.5 * std::atan2(2.0 * a[p][q], a[q][q] - a[p][p]);
    const double c = std::cos(phi), s = std::sin(phi);
    for (std::size_t k = 0; k < n; ++k) {
      const double akp = a[k][p], akq = a[k][q];
      a[k][p] = c * akp - s * akq;
      a[k][q] = s * akp + c * akq;
    }
    for (std::size_t k = 0; k < n; ++k) {
      const double apk = a[p][k], aqk = a[q][k];
      a[p][k] = c * apk - s * aqk;
      a[q][k] = s * apk + c * aqk;
    }
    for (std::size_t k = 0; k < n; ++k) {
      const double vkp = v[k][p], vkq = v[k][q];
      v[k][p] = c * vkp - s * vkq;
      v[k][q] = s * vkp + c * vkq;
    }
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto x, auto y) { return a[x][x] > a[y][y]; });
  Eigen out;
  for (auto i : order) {
    out.values.push_back(a[i][i]);
    std::vector<double> col(n);
    for (std::size_t k = 0; k < n; ++k) col[k] = v[k][i];
    out.vectors.push_back(col);
  }
  return out;
}

// Population covariance computed via E[xy] - E[x]E[y] in long double.
inline Dense covariance(const Dense& rows) {
  const std::size_t n = rows.size(), d = rows.front().size();
  Dense c(d, std::vector<double>(d, 0.0));
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) {
      long double sa = 0, sb = 0, sab = 0;
      for (const auto& r : rows) sa += r[a], sb += r[b], sab += static_cast<long double>(r[a]) * r[b];
      const long double m = static_cast<long double>(n);
      c[a][b] = static_cast<double>(sab / m - (sa / m) * (sb / m));
    }
  return c;
}

inline double partition_inertia(const std::vector<std::array<double, 2>>& pts, std::uint32_t mask) {
  double sx[2] = {0, 0}, sy[2] = {0, 0};
  std::size_t cnt[2] = {0, 0};
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const int c = (mask >> i) & 1u;
    sx[c] += pts[i][0], sy[c] += pts[i][1], ++cnt[c];
  }
  double s = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const int c = (mask >> i) & 1u;
    const double dx = pts[i][0] - sx[c] / cnt[c], dy = pts[i][1] - sy[c] / cnt[c];
    s += dx * dx + dy * dy;
  }
  return s;
}

// Minimum two-cluster inertia over every split into two non-empty groups.
// Point 0 always sits in group 0, so each split is visited once.
inline double best_two_partition(const std::vector<std::array<double, 2>>& pts) {
  const std::size_t n = pts.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 2; mask < (1u << n); mask += 2) best = std::min(best, partition_inertia(pts, mask));
  return best;
}

// Direct linear transform for four correspondences, solved by Gaussian
// elimination with full pivoting on raw coordinates. Returns h with h[8] = 1.
inline std::array<double, 9> homography_full_pivot(const std::array<std::array<double, 2>, 4>& src,
                                                   const std::array<std::array<double, 2>, 4>& dst) {
  double m[8][9] = {};
  for (int i = 0; i < 4; ++i) {
    const double x = src[i][0], y = src[i][1], u = dst[i][0], v = dst[i][1];
    const double r0[9] = {x, y, 1, 0, 0, 0, -u * x, -u * y, u};
    const double r1[9] = {0, 0, 0, x, y, 1, -v * x, -v * y, v};
    std::copy(r0, r0 + 9, m[2 * i]);
    std::copy(r1, r1 + 9, m[2 * i + 1]);
  }
  int col_of[8];
  for (int i = 0; i < 8; ++i) col_of[i] = i;
  for (int k = 0; k < 8; ++k) {
    int pr = k, pc = k;
    for (int r = k; r < 8; ++r)
      for (int c = k; c < 8; ++c)
        if (std::abs(m[r][c]) > std::abs(m[pr][pc])) pr = r, pc = c;
    for (int c = 0; c < 9; ++c) std::swap(m[k][c], m[pr][c]);
    for (int r = 0; r < 8; ++r) std::swap(m[r][k], m[r][pc]);
    std::swap(col_of[k], col_of[pc]);
    for (int r = 0; r < 8; ++r) {
      if (r == k) continue;
      const double f = m[r][k] / m[k][k];
      for (int c = k; c < 9; ++c) m[r][c] -= f * m[k][c];
    }
  }
  std::array<double, 9> h{};
  for (int k = 0; k < 8; ++k) h[col_of[k]] = m[k][8] / m[k][k];
  h[8] = 1.0;
  return h;
}

inline std::array<double, 2> apply(const std::array<double, 9>& h, double x, double y) {
  const double w = h[6] * x + h[7] * y + h[8];
  return {(h[0] * x + h[1] * y + h[2]) / w, (h[3] * x + h[4] * y + h[5]) / w};
}

}  // namespace oracle
