#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "mono3d/geometry.hpp"

namespace mono3d::nms {

using Matrix = std::vector<std::vector<double>>;

/// Defaults used by the reference experiments.
inline constexpr double kDefaultNt = 0.4;
inline constexpr double kDefaultValid = 0.3;
inline constexpr std::size_t kDefaultAlpha = 100;

enum class PruneKind { hard, linear, exponential, sigmoidal };

/// Pruning function p(o) on IoU2D overlaps.
///   hard:        1 if o > Nt else 0
///   linear:      p(o) = o
///   exponential: p(o) = 1 - exp(-o^2 / tau)
///   sigmoidal:   p(o) = sigmoid((o - Nt) / tau)
struct PruneSpec {
  PruneKind kind = PruneKind::linear;
  double nt = kDefaultNt;
  std::optional<double> tau;

  bool differentiable() const { return kind != PruneKind::hard; }
};

double prune(const PruneSpec& spec, double overlap);

/// dp/do. Throws std::invalid_argument for the hard kind.
double prune_derivative(const PruneSpec& spec, double overlap);

/// Boxes sorted by descending score together with the sorted score
/// vector, the original-index permutation and the IoU2D matrix in
/// sorted order. Ties in score are broken by original index.
class ScoredBoxSet {
 public:
  static ScoredBoxSet from_boxes(std::vector<geometry::Box3D> boxes);
  /// Synthetic set from raw scores and a symmetric unit-diagonal
  /// overlap matrix (sorted internally).
  static ScoredBoxSet from_scores(std::vector<double> scores, Matrix overlaps);

  std::size_t size() const { return s.size(); }

  std::vector<geometry::Box3D> boxes;  // sorted order (empty for synthetic sets)
  std::vector<double> s;               // scores, non-increasing
  std::vector<std::size_t> perm;       // perm[k] = original index of sorted box k
  Matrix o;                            // IoU2D in sorted order
};

/// Disjoint groups of sorted-order indices. The first index of each
/// group carries its highest score. Boxes dropped by the alpha cap
/// land in suppressed_overflow.
struct Grouping {
  std::vector<std::vector<std::size_t>> groups;
  std::size_t alpha = kDefaultAlpha;
  std::vector<std::size_t> suppressed_overflow;
};

Grouping group_boxes(const ScoredBoxSet& set, double nt, std::size_t alpha);

/// One entry of the sparse Jacobian d r_i / d O_{ij}.
struct OverlapJacEntry {
  std::size_t i = 0;
  std::size_t j = 0;
  double value = 0.0;
};

struct RescoreResult {
  std::vector<double> r;           // rescores, sorted order
  std::vector<std::size_t> valid;  // original indices with r >= v
  Matrix jac_s;                    // d r / d s, filled by rescore_jacobians
  std::vector<OverlapJacEntry> jac_o;
};

/// Masked group rescore: the group top keeps r = s, every other
/// member i gets clip(s_i - p(o_{i,top}) * s_top), overflow boxes 0.
RescoreResult groomed_rescore(const ScoredBoxSet& set, const Grouping& grouping,
                              const PruneSpec& spec, double v = kDefaultValid);

/// Full matrix form: forward substitution of (I + P) r = s, then clip.
RescoreResult groomed_rescore_full(const ScoredBoxSet& set, const PruneSpec& spec,
                                   double v = kDefaultValid);

/// Greedy classical / soft NMS: pop the argmax of the remaining
/// rescores and multiply the rest by (1 - p(o)).
RescoreResult reference_nms(const ScoredBoxSet& set, const PruneSpec& spec,
                            double v = kDefaultValid);

/// Analytic Jacobians of the masked rescore. The clip is treated as a
/// gate: gradient zero where it saturates, boundary on the open side.
/// Throws std::invalid_argument for hard pruning.
RescoreResult rescore_jacobians(const ScoredBoxSet& set, const Grouping& grouping,
                                const PruneSpec& spec, double v = kDefaultValid);

/// Indices (original ordering via perm) whose rescore passes v.
std::vector<std::size_t> select_valid(const std::vector<double>& r,
                                      const std::vector<std::size_t>& perm, double v);

}  // namespace mono3d::nms
