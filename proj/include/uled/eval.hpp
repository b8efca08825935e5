#pragma once

#include <cstddef>
#include <span>

#include "uled/features.hpp"
#include "uled/frame.hpp"
#include "uled/grid.hpp"
#include "uled/ml.hpp"

namespace uled::eval {

/// Rows are the true status, columns the prediction.
struct ConfusionMatrix {
  std::size_t true_functional_pred_functional = 0;
  std::size_t true_functional_pred_defect = 0;
  std::size_t true_defect_pred_functional = 0;
  std::size_t true_defect_pred_defect = 0;
  double accuracy = 0.0;
  /// Functional cells predicted defect, over all truly functional cells.
  double false_negative_rate = 0.0;
  /// Defect cells predicted functional, over all truly defective cells.
  double false_positive_rate = 0.0;
  bool fnr_undefined = false;  // no truly functional cells; rate reported as 0
  bool fpr_undefined = false;  // no truly defective cells; rate reported as 0

  std::size_t total() const noexcept {
    return true_functional_pred_functional + true_functional_pred_defect +
           true_defect_pred_functional + true_defect_pred_defect;
  }
};

/// Builds the rates from the four counts.
ConfusionMatrix make_confusion(std::size_t ff, std::size_t fd, std::size_t df, std::size_t dd);

/// `predicted` holds one status per interior cell of `grid`, row-major.
/// Throws ErrorKind::dimension when the truth map is not grid.rows() x
/// grid.cols() or the prediction count differs from the interior count.
ConfusionMatrix confusion(std::span<const ml::CellStatus> predicted, const DefectMap& truth,
                          const grid::PixelGrid& grid);

struct LesStats {
  double raw_mean = 0.0;
  double raw_sem = 0.0;
  std::size_t raw_count = 0;
  double denoised_mean = 0.0;
  double denoised_sem = 0.0;
  std::size_t denoised_count = 0;
};

/// Raw statistics over every cell's mean_l, denoised over functional cells
/// only. SEM = population std / sqrt(count). Summation runs in index order.
/// Throws ErrorKind::input for no cells or no functional cell and
/// ErrorKind::dimension when the two spans differ in length.
LesStats les_statistics(std::span<const features::CellFeatures> cells,
                        std::span<const ml::CellStatus> predicted);

}  // namespace uled::eval
