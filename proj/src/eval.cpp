#include "uled/eval.hpp"

#include <cassert>
#include <cmath>
#include <string>
#include <vector>

#include "uled/error.hpp"

namespace uled::eval {
namespace {

double ratio(std::size_t num, std::size_t den, bool& undefined) {
  undefined = den == 0;
  return undefined ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

struct MeanSem {
  double mean = 0.0, sem = 0.0;
};

MeanSem mean_sem(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double sum = 0.0;
  for (double x : v) sum += x;
  MeanSem out;
  out.mean = sum / n;
  double ss = 0.0;
  for (double x : v) ss += (x - out.mean) * (x - out.mean);
  out.sem = std::sqrt(ss / n) / std::sqrt(n);
  return out;
}

}  // namespace

ConfusionMatrix make_confusion(std::size_t ff, std::size_t fd, std::size_t df, std::size_t dd) {
  ConfusionMatrix m;
  m.true_functional_pred_functional = ff;
  m.true_functional_pred_defect = fd;
  m.true_defect_pred_functional = df;
  m.true_defect_pred_defect = dd;
  bool unused = false;
  m.accuracy = ratio(ff + dd, m.total(), unused);
  m.false_negative_rate = ratio(fd, ff + fd, m.fnr_undefined);
  m.false_positive_rate = ratio(df, df + dd, m.fpr_undefined);
  assert(m.accuracy >= 0.0 && m.accuracy <= 1.0);
  return m;
}

ConfusionMatrix confusion(std::span<const ml::CellStatus> predicted, const DefectMap& truth,
                          const grid::PixelGrid& grid) {
  if (truth.rows() != grid.rows() || truth.cols() != grid.cols())
    throw Error(ErrorKind::dimension, "defect map is " + std::to_string(truth.rows()) + "x" +
                                          std::to_string(truth.cols()) + " but the grid has " +
                                          std::to_string(grid.rows()) + "x" + std::to_string(grid.cols()) +
                                          " cells");
  const auto cells = grid.interior_cells();
  if (predicted.size() != cells.size())
    throw Error(ErrorKind::dimension, std::to_string(predicted.size()) + " predictions for " +
                                          std::to_string(cells.size()) + " interior cells");
  std::size_t ff = 0, fd = 0, df = 0, dd = 0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const bool defect_truth = truth.is_defective(cells[i].row, cells[i].col);
    const bool defect_pred = predicted[i] == ml::CellStatus::defect;
    if (defect_truth)
      ++(defect_pred ? dd : df);
    else
      ++(defect_pred ? fd : ff);
  }
  return make_confusion(ff, fd, df, dd);
}

LesStats les_statistics(std::span<const features::CellFeatures> cells,
                        std::span<const ml::CellStatus> predicted) {
  if (cells.empty()) throw Error(ErrorKind::input, "LES statistics need at least one cell");
  if (cells.size() != predicted.size())
    throw Error(ErrorKind::dimension, "status count does not match the cell count");
  std::vector<double> raw, functional;
  raw.reserve(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    raw.push_back(cells[i].mean_l);
    if (predicted[i] == ml::CellStatus::functional) functional.push_back(cells[i].mean_l);
  }
  if (functional.empty()) throw Error(ErrorKind::input, "no cell is labelled functional");
  LesStats s;
  const auto r = mean_sem(raw);
  const auto d = mean_sem(functional);
  s.raw_mean = r.mean;
  s.raw_sem = r.sem;
  s.raw_count = raw.size();
  s.denoised_mean = d.mean;
  s.denoised_sem = d.sem;
  s.denoised_count = functional.size();
  return s;
}

}  // namespace uled::eval
