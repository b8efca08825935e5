#pragma once

#include <span>
#include <string>

#include "uled/features.hpp"
#include "uled/grid.hpp"
#include "uled/pipeline.hpp"

namespace uled::report {

/// Report document: frame, corners, grid (edges and metrics), pca, kmeans,
/// confusion (null without truth), les_stats, flags and per_cell. Keys keep
/// a fixed order and numbers use shortest round-trip formatting, so equal
/// analyses render to equal bytes.
std::string render_json(const pipeline::Analysis& analysis);

/// Two columns "coordinate,value"; coordinate i + 0.5 for sample i.
std::string projection_csv(const grid::AxisProjection& projection);

/// Header row,col,mean_l,max_l,min_l,std_l,mean_cx,mean_cy.
std::string features_csv(std::span<const features::CellFeatures> cells);

/// Per-cell luminance heat map with the grid drawn on top and cells labelled
/// defect outlined.
std::string overlay_svg(const pipeline::Analysis& analysis);

}  // namespace uled::report
