#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "mono3d/geometry.hpp"

namespace mono3d::target_loss {

/// Box-to-ground-truth quality q = IoU2D * (1 + gIoU3D) / 2.
double quality(const geometry::Box3D& b, const geometry::Box3D& g);

struct Assignment {
  std::vector<int> labels;                             // 1 for the best box of some gt
  std::vector<double> quality;                         // best q per box over all gts
  std::vector<std::optional<std::size_t>> matched_gt;  // gt index when labeled
};

/// Per ground truth, the argmax-quality box gets label 1 iff q >= beta.
/// Argmax ties break by lowest box index; a box claimed by several gts
/// matches the highest-quality one (then lowest gt index).
Assignment assign_targets(const std::vector<geometry::Box3D>& boxes,
                          const std::vector<geometry::Box3D>& gts, double beta);

/// AP of one ranking: mean precision at each positive under descending
/// rescores (ties by index). No positives gives AP = 1.
double average_precision(const std::vector<double>& rescores, const std::vector<int>& labels);

/// Imagewise AP loss: 1 - mean per-image AP.
double imagewise_ap(const std::vector<std::vector<double>>& rescores_per_image,
                    const std::vector<std::vector<int>>& labels_per_image);

}  // namespace mono3d::target_loss
