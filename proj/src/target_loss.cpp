#include "mono3d/target_loss.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace mono3d::target_loss {

double quality(const geometry::Box3D& b, const geometry::Box3D& g) {
  const double o2d = geometry::iou2d(b.box2d, g.box2d);
  if (o2d <= 0.0) return 0.0;
  return o2d * (1.0 + geometry::giou3d(b, g)) / 2.0;
}

Assignment assign_targets(const std::vector<geometry::Box3D>& boxes,
                          const std::vector<geometry::Box3D>& gts, double beta) {
  if (beta <= 0.0 || beta >= 1.0) {
    throw std::invalid_argument("assign_targets: beta must lie in (0, 1)");
  }
  const std::size_t n = boxes.size();
  Assignment out;
  out.labels.assign(n, 0);
  out.quality.assign(n, 0.0);
  out.matched_gt.assign(n, std::nullopt);

  std::vector<std::vector<double>> q(n, std::vector<double>(gts.size(), 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t l = 0; l < gts.size(); ++l) {
      q[j][l] = quality(boxes[j], gts[l]);
      out.quality[j] = std::max(out.quality[j], q[j][l]);
    }
  }

  for (std::size_t l = 0; l < gts.size(); ++l) {
    std::size_t best = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (best == n || q[j][l] > q[best][l]) best = j;  // ties keep lowest index
    }
    if (best == n || q[best][l] < beta) continue;
    out.labels[best] = 1;
    if (!out.matched_gt[best].has_value() || q[best][l] > q[best][*out.matched_gt[best]]) {
      out.matched_gt[best] = l;
    }
  }
  return out;
}

double average_precision(const std::vector<double>& rescores, const std::vector<int>& labels) {
  if (rescores.size() != labels.size()) {
    throw std::invalid_argument("average_precision: length mismatch");
  }
  const std::size_t n = rescores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rescores[a] > rescores[b]; });

  std::size_t positives_seen = 0;
  double precision_sum = 0.0;
  for (std::size_t rank = 0; rank < n; ++rank) {
    if (labels[order[rank]] == 1) {
      ++positives_seen;
      precision_sum += static_cast<double>(positives_seen) / static_cast<double>(rank + 1);
    }
  }
  if (positives_seen == 0) return 1.0;  // no ranking error possible
  return precision_sum / static_cast<double>(positives_seen);
}

double imagewise_ap(const std::vector<std::vector<double>>& rescores_per_image,
                    const std::vector<std::vector<int>>& labels_per_image) {
  if (rescores_per_image.size() != labels_per_image.size()) {
    throw std::invalid_argument("imagewise_ap: image count mismatch");
  }
  if (rescores_per_image.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t m = 0; m < rescores_per_image.size(); ++m) {
    acc += average_precision(rescores_per_image[m], labels_per_image[m]);
  }
  return 1.0 - acc / static_cast<double>(rescores_per_image.size());
}

}  // namespace mono3d::target_loss
