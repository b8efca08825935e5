#include "uled/ml.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "uled/error.hpp"
#include "uled/parallel.hpp"
#include "uled/rng.hpp"
#include "uled/simd/kernels.hpp"

namespace uled::ml {

Matrix feature_matrix(std::span<const features::CellFeatures> cells) {
  Matrix m(cells.size(), features::kFeatureCount);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto v = cells[i].values();
    for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = v[j];
  }
  return m;
}

Matrix Standardizer::transform(const Matrix& x) const {
  if (x.cols() != mean.size())
    throw Error(ErrorKind::dimension, "standardizer expects " + std::to_string(mean.size()) +
                                          " columns, got " + std::to_string(x.cols()));
  Matrix z(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) z(i, j) = (x(i, j) - mean[j]) / scale[j];
  return z;
}

std::pair<Standardizer, Matrix> standardize_fit_transform(const Matrix& x) {
  if (x.rows() < 2) throw Error(ErrorKind::input, "standardization needs at least 2 rows");
  const std::size_t n = x.rows(), d = x.cols();
  Standardizer s;
  s.mean.assign(d, 0.0);
  s.scale.assign(d, 1.0);
  for (std::size_t j = 0; j < d; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += x(i, j);
    const double m = sum / static_cast<double>(n);
    double ss = 0.0;
    bool constant = true;
    for (std::size_t i = 0; i < n; ++i) {
      const double dv = x(i, j) - m;
      ss += dv * dv;
      constant = constant && x(i, j) == x(0, j);
    }
    const double sd = std::sqrt(ss / static_cast<double>(n));
    // A constant column gets its exact value as mean so it maps to exact zeros.
    s.mean[j] = constant ? x(0, j) : m;
    s.scale[j] = (constant || !(sd > 0.0)) ? 1.0 : sd;
  }
  Matrix z = s.transform(x);
  return {std::move(s), std::move(z)};
}

Matrix covariance(const Matrix& x) {
  const std::size_t n = x.rows(), d = x.cols();
  if (n == 0) throw Error(ErrorKind::input, "covariance of an empty matrix");
  std::vector<double> mean(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < n; ++i) mean[j] += x(i, j);
    mean[j] /= static_cast<double>(n);
  }
  Matrix c(d, d);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a; b < d; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += (x(i, a) - mean[a]) * (x(i, b) - mean[b]);
      c(a, b) = c(b, a) = s / static_cast<double>(n);
    }
  return c;
}

SymmetricEigen jacobi_eigen(const Matrix& symmetric, int max_sweeps) {
  const std::size_t d = symmetric.rows();
  if (symmetric.cols() != d) throw Error(ErrorKind::dimension, "eigen-decomposition needs a square matrix");
  Matrix a = symmetric;
  Matrix v(d, d);
  for (std::size_t i = 0; i < d; ++i) v(i, i) = 1.0;

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t p = 0; p < d; ++p)
      for (std::size_t q = p + 1; q < d; ++q) s += a(p, q) * a(p, q);
    return s;
  };
  double total = 0.0;
  for (double e : a.data()) total += e * e;
  const double eps = std::numeric_limits<double>::epsilon();
  const double target = total * eps * eps;

  bool converged = off_norm() <= target;
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    for (std::size_t p = 0; p + 1 < d; ++p)
      for (std::size_t q = p + 1; q < d; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < d; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < d; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    converged = off_norm() <= target;
  }
  if (!converged)
    throw Error(ErrorKind::convergence,
                "Jacobi eigen-decomposition did not converge in " + std::to_string(max_sweeps) + " sweeps");

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return a(i, i) > a(j, j); });
  SymmetricEigen out;
  out.vectors = Matrix(d, d);
  for (std::size_t c = 0; c < d; ++c) {
    out.values.push_back(a(order[c], order[c]));
    for (std::size_t r = 0; r < d; ++r) out.vectors(r, c) = v(r, order[c]);
  }
  return out;
}

PcaModel pca_fit(const Matrix& z) {
  if (z.rows() < 3) throw Error(ErrorKind::input, "PCA needs at least 3 rows");
  if (z.cols() < 2) throw Error(ErrorKind::input, "PCA needs at least 2 columns");
  const auto eig = jacobi_eigen(covariance(z));
  PcaModel m;
  m.components = Matrix(2, z.cols());
  for (std::size_t c = 0; c < 2; ++c) {
    std::size_t arg = 0;
    for (std::size_t r = 1; r < z.cols(); ++r)
      if (std::abs(eig.vectors(r, c)) > std::abs(eig.vectors(arg, c))) arg = r;
    const double sign = eig.vectors(arg, c) < 0 ? -1.0 : 1.0;
    for (std::size_t r = 0; r < z.cols(); ++r) m.components(c, r) = sign * eig.vectors(r, c);
    m.explained_variance[c] = std::max(0.0, eig.values[c]);
  }
  return m;
}

Matrix pca_transform(const PcaModel& model, const Matrix& z) {
  if (z.cols() != model.components.cols())
    throw Error(ErrorKind::dimension, "PCA model expects " + std::to_string(model.components.cols()) +
                                          " columns, got " + std::to_string(z.cols()));
  Matrix y(z.rows(), model.components.rows());
  for (std::size_t i = 0; i < z.rows(); ++i)
    for (std::size_t c = 0; c < y.cols(); ++c) {
      double s = 0.0;
      for (std::size_t j = 0; j < z.cols(); ++j) s += z(i, j) * model.components(c, j);
      y(i, c) = s;
    }
  return y;
}

double inertia(const Matrix& y, const Matrix& centroids, std::span<const std::int32_t> labels) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.rows(); ++i) {
    const auto c = static_cast<std::size_t>(labels[i]);
    const double dx = y(i, 0) - centroids(c, 0);
    const double dy = y(i, 1) - centroids(c, 1);
    s += dx * dx + dy * dy;
  }
  return s;
}

namespace {

struct Restart {
  std::vector<double> cx, cy;
  std::vector<std::int32_t> labels;
  double inertia = 0.0;
  std::size_t iterations = 0;
};

struct Points {
  std::vector<double> xs, ys;
};

void assign(const Points& p, const std::vector<double>& cx, const std::vector<double>& cy,
            std::vector<std::int32_t>& labels, std::vector<double>& dist2) {
  simd::active_kernels().nearest_centroid(p.xs.data(), p.ys.data(), p.xs.size(), cx.data(), cy.data(),
                                          cx.size(), labels.data(), dist2.data());
}

double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

// k-means++: first center uniform, then each next center drawn with
// probability proportional to the squared distance to the nearest chosen one.
void seed_plus_plus(const Points& p, std::size_t k, SplitMix64& rng, std::vector<double>& cx,
                    std::vector<double>& cy) {
  const std::size_t n = p.xs.size();
  std::size_t first = static_cast<std::size_t>(rng.below(n));
  cx.assign(1, p.xs[first]);
  cy.assign(1, p.ys[first]);
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = p.xs[i] - cx[0], dy = p.ys[i] - cy[0];
    d2[i] = dx * dx + dy * dy;
  }
  while (cx.size() < k) {
    const double total = sum(d2);
    std::size_t pick = 0;
    if (total > 0.0) {
      const double r = rng.uniform() * total;
      double acc = 0.0;
      pick = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) continue;
        acc += d2[i];
        pick = i;
        if (acc > r) break;
      }
    } else {
      pick = static_cast<std::size_t>(rng.below(n));
    }
    cx.push_back(p.xs[pick]);
    cy.push_back(p.ys[pick]);
    for (std::size_t i = 0; i < n; ++i) {
      const double dx = p.xs[i] - cx.back(), dy = p.ys[i] - cy.back();
      d2[i] = std::min(d2[i], dx * dx + dy * dy);
    }
  }
}

void recompute_centroids(const Points& p, std::size_t k, const std::vector<std::int32_t>& labels,
                         std::vector<double>& cx, std::vector<double>& cy, std::vector<std::size_t>& count) {
  std::vector<double> sx(k, 0.0), sy(k, 0.0);
  count.assign(k, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto c = static_cast<std::size_t>(labels[i]);
    sx[c] += p.xs[i];
    sy[c] += p.ys[i];
    ++count[c];
  }
  for (std::size_t c = 0; c < k; ++c)
    if (count[c] > 0) {
      cx[c] = sx[c] / static_cast<double>(count[c]);
      cy[c] = sy[c] / static_cast<double>(count[c]);
    }
}

// Single-point transfers: moving x from cluster a (n_a > 1) to b changes the
// inertia by n_b/(n_b+1)|x-c_b|^2 - n_a/(n_a-1)|x-c_a|^2. Moves are applied
// while some point strictly lowers the inertia. A Lloyd fixed point can still
// admit such a move, so this escapes some local minima Lloyd stops in.
void hartigan_refine(const Points& p, const KMeansConfig& cfg, Restart& r) {
  const std::size_t n = p.xs.size(), k = cfg.k;
  std::vector<std::size_t> count;
  recompute_centroids(p, k, r.labels, r.cx, r.cy, count);
  for (std::size_t pass = 0; pass < cfg.max_iter; ++pass) {
    bool moved = false;
    for (std::size_t i = 0; i < n; ++i) {
      const auto a = static_cast<std::size_t>(r.labels[i]);
      if (count[a] < 2) continue;
      auto d2 = [&](std::size_t c) {
        const double dx = p.xs[i] - r.cx[c], dy = p.ys[i] - r.cy[c];
        return dx * dx + dy * dy;
      };
      const double leave = static_cast<double>(count[a]) / static_cast<double>(count[a] - 1) * d2(a);
      std::size_t best = a;
      double best_join = leave;
      for (std::size_t b = 0; b < k; ++b) {
        if (b == a) continue;
        const double join = static_cast<double>(count[b]) / static_cast<double>(count[b] + 1) * d2(b);
        if (join < best_join) best_join = join, best = b;
      }
      // The margin keeps rounding noise from cycling points between clusters.
      if (best != a && best_join < leave * (1.0 - 1e-12)) {
        r.labels[i] = static_cast<std::int32_t>(best);
        recompute_centroids(p, k, r.labels, r.cx, r.cy, count);
        moved = true;
      }
    }
    if (!moved) break;
  }
}

Restart run_restart(const Points& p, const KMeansConfig& cfg, std::uint64_t seed) {
  const std::size_t n = p.xs.size(), k = cfg.k;
  SplitMix64 rng(seed);
  Restart r;
  seed_plus_plus(p, k, rng, r.cx, r.cy);
  r.labels.assign(n, 0);
  std::vector<double> dist2(n);
  std::vector<double> sx(k), sy(k);
  std::vector<std::size_t> count(k);
  [[maybe_unused]] double previous = std::numeric_limits<double>::infinity();

  for (std::size_t it = 0; it < cfg.max_iter; ++it) {
    assign(p, r.cx, r.cy, r.labels, dist2);
    [[maybe_unused]] const double current = sum(dist2);
    assert(current <= previous * (1.0 + 1e-12) + 1e-300);
    previous = current;
    r.iterations = it + 1;

    std::fill(sx.begin(), sx.end(), 0.0);
    std::fill(sy.begin(), sy.end(), 0.0);
    std::fill(count.begin(), count.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(r.labels[i]);
      sx[c] += p.xs[i];
      sy[c] += p.ys[i];
      ++count[c];
    }
    double movement = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      double nx, ny;
      if (count[c] == 0) {
        const auto far = static_cast<std::size_t>(
            std::max_element(dist2.begin(), dist2.end()) - dist2.begin());
        nx = p.xs[far];
        ny = p.ys[far];
        dist2[far] = 0.0;
      } else {
        nx = sx[c] / static_cast<double>(count[c]);
        ny = sy[c] / static_cast<double>(count[c]);
      }
      const double dx = nx - r.cx[c], dy = ny - r.cy[c];
      movement += dx * dx + dy * dy;
      r.cx[c] = nx;
      r.cy[c] = ny;
    }
    if (movement < cfg.tol) break;
  }
  assign(p, r.cx, r.cy, r.labels, dist2);
  hartigan_refine(p, cfg, r);
  assign(p, r.cx, r.cy, r.labels, dist2);
  r.inertia = sum(dist2);
  return r;
}

}  // namespace

KMeansModel kmeans_fit(const Matrix& y, const KMeansConfig& config) {
  const std::size_t n = y.rows();
  if (config.k == 0) throw Error(ErrorKind::input, "k-means needs k >= 1");
  if (config.n_init == 0) throw Error(ErrorKind::input, "k-means needs n_init >= 1");
  if (y.cols() != 2) throw Error(ErrorKind::input, "k-means expects 2 columns, got " + std::to_string(y.cols()));
  if (n < config.k)
    throw Error(ErrorKind::input,
                "k-means needs at least k=" + std::to_string(config.k) + " points, got " + std::to_string(n));
  Points p;
  p.xs.resize(n);
  p.ys.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(y(i, 0)) || !std::isfinite(y(i, 1)))
      throw Error(ErrorKind::input, "non-finite k-means input at row " + std::to_string(i));
    p.xs[i] = y(i, 0);
    p.ys[i] = y(i, 1);
  }

  std::vector<Restart> runs(config.n_init);
  parallel_for(
      config.n_init,
      [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) runs[r] = run_restart(p, config, derive_seed(config.seed, r));
      },
      config.threads);

  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r].inertia < runs[best].inertia) best = r;

  KMeansModel m;
  m.centroids = Matrix(config.k, 2);
  for (std::size_t c = 0; c < config.k; ++c) {
    m.centroids(c, 0) = runs[best].cx[c];
    m.centroids(c, 1) = runs[best].cy[c];
  }
  m.labels = std::move(runs[best].labels);
  m.inertia = runs[best].inertia;
  m.config = config;
  m.best_restart = best;
  m.iterations = runs[best].iterations;
  return m;
}

Labeling label_clusters(const KMeansModel& model, std::span<const features::CellFeatures> cells,
                        const LabelOptions& options) {
  if (model.labels.size() != cells.size())
    throw Error(ErrorKind::dimension, "cluster labels do not align with the cell features");
  const std::size_t k = model.centroids.rows();
  std::vector<double> total(k, 0.0);
  std::vector<std::size_t> count(k, 0);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto c = static_cast<std::size_t>(model.labels[i]);
    total[c] += cells[i].mean_l;
    ++count[c];
  }
  std::vector<double> avg(k, 0.0);
  Labeling out;
  bool found = false;
  for (std::size_t c = 0; c < k; ++c) {
    if (count[c] == 0) continue;
    avg[c] = total[c] / static_cast<double>(count[c]);
    if (!found || avg[c] > avg[static_cast<std::size_t>(out.functional_cluster)]) {
      out.functional_cluster = static_cast<std::int32_t>(c);
      found = true;
    }
  }
  const double bright = avg[static_cast<std::size_t>(out.functional_cluster)];
  std::vector<bool> defect(k, false);
  for (std::size_t c = 0; c < k; ++c)
    defect[c] = count[c] > 0 && avg[c] < options.max_defect_ratio * bright;

  out.status.resize(cells.size(), CellStatus::functional);
  out.degenerate = true;
  for (std::size_t i = 0; i < cells.size(); ++i)
    if (defect[static_cast<std::size_t>(model.labels[i])]) {
      out.status[i] = CellStatus::defect;
      out.degenerate = false;
    }
  return out;
}

}  // namespace uled::ml
