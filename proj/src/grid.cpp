#include "uled/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "uled/error.hpp"
#include "uled/parallel.hpp"
#include "uled/simd/kernels.hpp"

namespace uled::grid {
namespace {

constexpr double kMinLag = 5.0;
constexpr double kSupportFraction = 0.1;
constexpr double kEdgeSupportFraction = 0.5;
constexpr double kMinimumContrast = 0.25;
constexpr double kPhaseStep = 0.05;
constexpr double kMarginClearance = 4.0;
constexpr std::size_t kMinMarginSamples = 8;

std::vector<double> smooth121(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double l = v[i == 0 ? 0 : i - 1];
    const double r = v[i + 1 == n ? i : i + 1];
    s[i] = (l + 2.0 * v[i] + r) / 4.0;
  }
  return s;
}

// Linear interpolation at coordinate c (sample i is centered at i + 0.5).
double sample_at(const std::vector<double>& s, double c) {
  const double u = c - 0.5;
  if (u <= 0) return s.front();
  if (u >= static_cast<double>(s.size() - 1)) return s.back();
  const auto i = static_cast<std::size_t>(u);
  const double f = u - static_cast<double>(i);
  return s[i] * (1.0 - f) + s[i + 1] * f;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>((v.size() - 1) / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

struct Span {
  std::size_t first, last;  // inclusive sample indices
};

Span support(const std::vector<double>& v, double fraction) {
  const double peak = *std::max_element(v.begin(), v.end());
  const double level = fraction * peak;
  std::size_t first = 0, last = v.size() - 1;
  while (first < last && v[first] < level) ++first;
  while (last > first && v[last] < level) --last;
  return {first, last};
}

// Sample indices whose centers fall within [lo, hi], clipped to [0, n).
bool centers_within(double lo, double hi, std::size_t n, std::size_t& first, std::size_t& last) {
  const double a = std::ceil(lo - 0.5), b = std::floor(hi - 0.5);
  if (b < 0 || a > static_cast<double>(n - 1) || a > b) return false;
  first = static_cast<std::size_t>(std::max(0.0, a));
  last = static_cast<std::size_t>(std::min(static_cast<double>(n - 1), b));
  return first <= last;
}

}  // namespace

double AxisProjection::total() const noexcept {
  double s = 0.0;
  for (double v : values) s += v;
  return s;
}

Projections project(const MeasurementFrame& frame) {
  frame.validate();
  const auto& k = simd::active_kernels();
  Projections p;
  p.x.axis = Axis::x;
  p.y.axis = Axis::y;
  p.x.values.assign(frame.width, 0.0);
  p.y.values.assign(frame.height, 0.0);
  const float* data = frame.luminance.data();
  const std::size_t w = frame.width;
  parallel_for(w, [&](std::size_t begin, std::size_t end) {
    for (std::size_t y = 0; y < frame.height; ++y)
      k.accumulate_columns(data + y * w + begin, p.x.values.data() + begin, end - begin);
  });
  parallel_for(frame.height, [&](std::size_t begin, std::size_t end) {
    for (std::size_t y = begin; y < end; ++y) p.y.values[y] = k.sum_row(data + y * w, w);
  });
  return p;
}

double estimate_period(const AxisProjection& projection, const GridOptions& options) {
  const auto& v = projection.values;
  if (v.size() < 3 * static_cast<std::size_t>(kMinLag + 1))
    throw Error(ErrorKind::periodicity, "projection too short to estimate a period");
  const auto span = support(v, kSupportFraction);
  const std::size_t n = span.last - span.first + 1;
  const std::size_t max_lag = n / 3;
  if (max_lag < static_cast<std::size_t>(kMinLag) + 2)
    throw Error(ErrorKind::periodicity, "emitting span too short to estimate a period");

  std::vector<double> a(v.begin() + static_cast<std::ptrdiff_t>(span.first),
                        v.begin() + static_cast<std::ptrdiff_t>(span.last + 1));
  const double mean = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(n);
  for (auto& x : a) x -= mean;
  const double energy = std::inner_product(a.begin(), a.end(), a.begin(), 0.0);
  if (!(energy > 0)) throw Error(ErrorKind::periodicity, "projection has no variation");

  std::vector<double> r(max_lag + 2, 0.0);
  for (std::size_t lag = static_cast<std::size_t>(kMinLag) - 1; lag < r.size(); ++lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) s += a[i] * a[i + lag];
    r[lag] = s / energy;
  }

  std::vector<std::size_t> peaks;
  double best = -1.0;
  for (std::size_t lag = static_cast<std::size_t>(kMinLag); lag <= max_lag; ++lag)
    if (r[lag] > r[lag - 1] && r[lag] >= r[lag + 1]) {
      peaks.push_back(lag);
      best = std::max(best, r[lag]);
    }
  if (peaks.empty() || best < options.min_peak)
    throw Error(ErrorKind::periodicity,
                "no autocorrelation peak above " + std::to_string(options.min_peak));
  // The fundamental: the shortest lag whose peak is close to the best one.
  std::size_t lag = peaks.front();
  for (auto p : peaks)
    if (r[p] >= 0.9 * best) {
      lag = p;
      break;
    }
  const double denom = r[lag - 1] - 2.0 * r[lag] + r[lag + 1];
  const double delta = denom < 0 ? 0.5 * (r[lag - 1] - r[lag + 1]) / denom : 0.0;
  return static_cast<double>(lag) + std::clamp(delta, -0.5, 0.5);
}

std::vector<double> detect_edges(const AxisProjection& projection, double period) {
  const auto& v = projection.values;
  if (!(period >= 2.0) || !std::isfinite(period))
    throw Error(ErrorKind::grid, "invalid period " + std::to_string(period));
  if (v.size() < 3) throw Error(ErrorKind::grid, "projection too short for edge detection");
  const auto s = smooth121(v);
  const std::size_t n = s.size();
  const auto span = support(s, kEdgeSupportFraction);
  const double lo_c = span.first + 0.5, hi_c = span.last + 0.5;

  double best_phase = 0.0, best_cost = 0.0;
  bool have = false;
  const auto steps = static_cast<std::size_t>(std::ceil(period / kPhaseStep));
  for (std::size_t step = 0; step < steps; ++step) {
    const double phase = lo_c + step * kPhaseStep;
    double sum = 0.0;
    std::size_t count = 0;
    for (double q = phase; q <= hi_c; q += period) sum += sample_at(s, q), ++count;
    if (count == 0) continue;
    const double cost = sum / static_cast<double>(count);
    if (!have || cost < best_cost) best_cost = cost, best_phase = phase, have = true;
  }
  if (!have) throw Error(ErrorKind::grid, "no lattice position inside the emitting span");

  std::vector<double> inside;
  inside.reserve(static_cast<std::size_t>((hi_c - lo_c) / period) + 1);
  for (std::size_t i = span.first; i <= span.last; ++i) inside.push_back(s[i]);
  const double floor_level = *std::min_element(inside.begin(), inside.end());
  const double plateau = median_of(inside);
  const double contrast = kMinimumContrast * (plateau - floor_level);

  // First lattice position not before the emitting span minus half a period.
  double q = best_phase - std::floor((best_phase - (lo_c - period / 2)) / period) * period;
  std::vector<double> edges;
  std::vector<bool> refined;
  for (; q <= hi_c + period / 2; q += period) {
    double edge = q;
    bool found = false;
    std::size_t first = 0, last = 0;
    if (centers_within(q - period / 4, q + period / 4, n, first, last) && last >= first + 2) {
      std::size_t m = first;
      for (std::size_t i = first + 1; i <= last; ++i)
        if (s[i] < s[m]) m = i;
      if (m > first && m < last) {
        const double left = *std::max_element(s.begin() + static_cast<std::ptrdiff_t>(first),
                                              s.begin() + static_cast<std::ptrdiff_t>(m));
        const double right = *std::max_element(s.begin() + static_cast<std::ptrdiff_t>(m + 1),
                                               s.begin() + static_cast<std::ptrdiff_t>(last + 1));
        if (left >= s[m] + contrast && right >= s[m] + contrast && contrast > 0) {
          const double denom = s[m - 1] - 2.0 * s[m] + s[m + 1];
          const double delta = denom > 0 ? 0.5 * (s[m - 1] - s[m + 1]) / denom : 0.0;
          edge = static_cast<double>(m) + 0.5 + std::clamp(delta, -0.5, 0.5);
          found = true;
        }
      }
    }
    edges.push_back(edge);
    refined.push_back(found);
  }
  // An unrefined position is carried from the nearest refined edge; the global
  // lattice drifts by the period error over the span.
  const auto anchors = edges;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (refined[i]) continue;
    std::size_t best = edges.size();
    for (std::size_t j = 0; j < edges.size(); ++j)
      if (refined[j] && (best == edges.size() || (j > i ? j - i : i - j) < (best > i ? best - i : i - best)))
        best = j;
    if (best != edges.size())
      edges[i] = anchors[best] + (static_cast<double>(i) - static_cast<double>(best)) * period;
  }
  if (edges.size() < 3)
    throw Error(ErrorKind::grid, "found " + std::to_string(edges.size()) + " edges, need at least 3");
  for (std::size_t i = 1; i < edges.size(); ++i)
    if (!(edges[i] > edges[i - 1])) throw Error(ErrorKind::grid, "edge positions are not increasing");
  return edges;
}

std::vector<Extent> measure_extents(const AxisProjection& projection, std::span<const double> edges) {
  const auto& v = projection.values;
  const std::size_t n = v.size();
  std::vector<Extent> out;
  if (edges.size() < 2) return out;
  out.reserve(edges.size() - 1);

  // Light spilling into a narrow gap lifts its minimum above the true dark
  // level, so the dark margin around the lattice is preferred when present.
  std::vector<double> margin;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = static_cast<double>(i) + 0.5;
    if (c < edges.front() - kMarginClearance || c > edges.back() + kMarginClearance) margin.push_back(v[i]);
  }
  const bool have_background = margin.size() >= kMinMarginSamples;
  const double background = have_background ? median_of(margin) : 0.0;

  auto floor_near = [&](double e) {
    std::size_t a = 0, b = 0;
    if (!centers_within(e - 1.0, e + 1.0, n, a, b)) return 0.0;
    const double local = *std::min_element(v.begin() + static_cast<std::ptrdiff_t>(a),
                                           v.begin() + static_cast<std::ptrdiff_t>(b + 1));
    return have_background ? std::min(local, background) : local;
  };

  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const double e0 = edges[k], e1 = edges[k + 1];
    Extent ext{e0, e1};
    std::size_t first = 0, last = 0, pf = 0, pl = 0;
    const double w = e1 - e0;
    if (!centers_within(e0, e1, n, first, last) ||
        !centers_within(e0 + w / 4, e1 - w / 4, n, pf, pl)) {
      out.push_back(ext);
      continue;
    }
    const double plateau = median_of(std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(pf),
                                                         v.begin() + static_cast<std::ptrdiff_t>(pl + 1)));
    const double floor_l = floor_near(e0), floor_r = floor_near(e1);
    if (!(plateau > floor_l && plateau > floor_r)) {
      out.push_back(ext);
      continue;
    }
    const double level_l = 0.5 * (floor_l + plateau);
    const double level_r = 0.5 * (floor_r + plateau);
    const std::size_t centre = (pf + pl) / 2;
    if (v[centre] < level_l || v[centre] < level_r) {
      out.push_back(ext);
      continue;
    }

    for (std::size_t i = centre; i > first; --i)
      if (v[i - 1] < level_l) {
        ext.lo = (static_cast<double>(i) - 0.5) + (level_l - v[i - 1]) / (v[i] - v[i - 1]);
        break;
      }
    for (std::size_t i = centre; i < last; ++i)
      if (v[i + 1] < level_r) {
        ext.hi = (static_cast<double>(i) + 0.5) + (v[i] - level_r) / (v[i] - v[i + 1]);
        break;
      }
    out.push_back(ext);
  }
  return out;
}

std::size_t PixelGrid::interior_count() const noexcept {
  return rows() > 2 && cols() > 2 ? (rows() - 2) * (cols() - 2) : 0;
}

std::vector<CellIndex> PixelGrid::interior_cells() const {
  std::vector<CellIndex> cells;
  cells.reserve(interior_count());
  for (std::size_t r = 0; r < rows(); ++r)
    for (std::size_t c = 0; c < cols(); ++c)
      if (is_interior(r, c)) cells.push_back({r, c});
  return cells;
}

CellRect PixelGrid::cell_rect(std::size_t row, std::size_t col) const noexcept {
  if (has_extents())
    return {x_extents_[col].lo, y_extents_[row].lo, x_extents_[col].hi, y_extents_[row].hi};
  return {x_edges_[col], y_edges_[row], x_edges_[col + 1], y_edges_[row + 1]};
}

PixelGrid build_grid(std::vector<double> x_edges, std::vector<double> y_edges,
                     std::vector<Extent> x_extents, std::vector<Extent> y_extents,
                     const GridOptions& options) {
  auto check_axis = [&](const std::vector<double>& e, const char* axis) {
    if (e.size() < 2) throw Error(ErrorKind::grid, std::string(axis) + " axis needs at least 2 edges");
    for (double x : e)
      if (!std::isfinite(x)) throw Error(ErrorKind::grid, std::string(axis) + " edge is not finite");
    std::vector<double> spacing(e.size() - 1);
    for (std::size_t i = 0; i + 1 < e.size(); ++i) {
      spacing[i] = e[i + 1] - e[i];
      if (!(spacing[i] > 0))
        throw Error(ErrorKind::grid, std::string(axis) + " edges " + std::to_string(i) + "," +
                                         std::to_string(i + 1) + " are not strictly increasing");
    }
    const double med = median_of(spacing);
    for (std::size_t i = 0; i < spacing.size(); ++i)
      if (std::abs(spacing[i] - med) > options.spacing_tolerance * med)
        throw Error(ErrorKind::grid, std::string(axis) + " edges " + std::to_string(i) + "," +
                                         std::to_string(i + 1) + " (" + std::to_string(e[i]) + ", " +
                                         std::to_string(e[i + 1]) + ") spacing " +
                                         std::to_string(spacing[i]) + " deviates from median " +
                                         std::to_string(med));
  };
  check_axis(x_edges, "x");
  check_axis(y_edges, "y");
  if (x_extents.empty() != y_extents.empty())
    throw Error(ErrorKind::grid, "extents must be given for both axes or neither");
  if (!x_extents.empty() &&
      (x_extents.size() != x_edges.size() - 1 || y_extents.size() != y_edges.size() - 1))
    throw Error(ErrorKind::grid, "one extent per cell is required on each axis");
  PixelGrid g;
  g.x_edges_ = std::move(x_edges);
  g.y_edges_ = std::move(y_edges);
  g.x_extents_ = std::move(x_extents);
  g.y_extents_ = std::move(y_extents);
  return g;
}

GridMetrics cell_size(const PixelGrid& grid) {
  if (grid.interior_count() == 0) throw Error(ErrorKind::metrics, "grid has no interior cells");
  auto stats = [](const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    return std::pair{mean, std::sqrt(var / static_cast<double>(v.size()))};
  };
  std::vector<double> widths, heights, pitch_x, pitch_y;
  for (std::size_t c = 1; c + 1 < grid.cols(); ++c) {
    const double pitch = grid.x_edges()[c + 1] - grid.x_edges()[c];
    pitch_x.push_back(pitch);
    widths.push_back(grid.has_extents() ? grid.x_extents()[c].width() : pitch);
  }
  for (std::size_t r = 1; r + 1 < grid.rows(); ++r) {
    const double pitch = grid.y_edges()[r + 1] - grid.y_edges()[r];
    pitch_y.push_back(pitch);
    heights.push_back(grid.has_extents() ? grid.y_extents()[r].width() : pitch);
  }
  GridMetrics m;
  std::tie(m.mean_cell_width, m.std_cell_width) = stats(widths);
  std::tie(m.mean_cell_height, m.std_cell_height) = stats(heights);
  m.mean_pitch_x = stats(pitch_x).first;
  m.mean_pitch_y = stats(pitch_y).first;
  return m;
}

PixelGrid reconstruct(const Projections& p, const GridOptions& options) {
  const double period_x = estimate_period(p.x, options);
  const double period_y = estimate_period(p.y, options);
  auto xe = detect_edges(p.x, period_x);
  auto ye = detect_edges(p.y, period_y);
  auto xx = measure_extents(p.x, xe);
  auto yx = measure_extents(p.y, ye);
  return build_grid(std::move(xe), std::move(ye), std::move(xx), std::move(yx), options);
}

PixelGrid reconstruct(const MeasurementFrame& frame, const GridOptions& options) {
  return reconstruct(project(frame), options);
}

}  // namespace uled::grid
