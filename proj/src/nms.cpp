#include "mono3d/nms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mono3d::nms {

namespace {

double clip01(double x) { return std::clamp(x, 0.0, 1.0); }

void require_tau(const PruneSpec& spec) {
  if (!spec.tau.has_value() || *spec.tau <= 0.0) {
    throw std::invalid_argument("prune: this kind requires a temperature tau > 0");
  }
}

std::vector<std::size_t> sort_permutation(const std::vector<double>& scores) {
  std::vector<std::size_t> perm(scores.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::stable_sort(perm.begin(), perm.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return perm;
}

}  // namespace

double prune(const PruneSpec& spec, double overlap) {
  switch (spec.kind) {
    case PruneKind::hard:
      return overlap > spec.nt ? 1.0 : 0.0;
    case PruneKind::linear:
      return overlap;
    case PruneKind::exponential:
      require_tau(spec);
      return 1.0 - std::exp(-overlap * overlap / *spec.tau);
    case PruneKind::sigmoidal:
      require_tau(spec);
      return 1.0 / (1.0 + std::exp(-(overlap - spec.nt) / *spec.tau));
  }
  throw std::invalid_argument("prune: unknown kind");
}

double prune_derivative(const PruneSpec& spec, double overlap) {
  switch (spec.kind) {
    case PruneKind::hard:
      throw std::invalid_argument("prune_derivative: hard pruning is not differentiable");
    case PruneKind::linear:
      return 1.0;
    case PruneKind::exponential:
      require_tau(spec);
      return (2.0 * overlap / *spec.tau) * std::exp(-overlap * overlap / *spec.tau);
    case PruneKind::sigmoidal: {
      require_tau(spec);
      const double p = prune(spec, overlap);
      return p * (1.0 - p) / *spec.tau;
    }
  }
  throw std::invalid_argument("prune_derivative: unknown kind");
}

ScoredBoxSet ScoredBoxSet::from_boxes(std::vector<geometry::Box3D> in) {
  std::vector<double> scores(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) scores[i] = in[i].score;
  const auto perm = sort_permutation(scores);

  ScoredBoxSet set;
  set.perm = perm;
  set.boxes.reserve(in.size());
  set.s.reserve(in.size());
  for (std::size_t k = 0; k < perm.size(); ++k) {
    set.boxes.push_back(in[perm[k]]);
    set.s.push_back(in[perm[k]].score);
  }
  const std::size_t n = set.boxes.size();
  set.o.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    set.o[i][i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double ov = geometry::iou2d(set.boxes[i].box2d, set.boxes[j].box2d);
      set.o[i][j] = ov;
      set.o[j][i] = ov;
    }
  }
  return set;
}

ScoredBoxSet ScoredBoxSet::from_scores(std::vector<double> scores, Matrix overlaps) {
  const std::size_t n = scores.size();
  if (overlaps.size() != n) {
    throw std::invalid_argument("from_scores: overlap matrix size mismatch");
  }
  for (const auto& row : overlaps) {
    if (row.size() != n) throw std::invalid_argument("from_scores: overlap matrix not square");
  }
  const auto perm = sort_permutation(scores);

  ScoredBoxSet set;
  set.perm = perm;
  set.s.reserve(n);
  for (std::size_t k = 0; k < n; ++k) set.s.push_back(scores[perm[k]]);
  set.o.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) set.o[i][j] = overlaps[perm[i]][perm[j]];
  }
  return set;
}

Grouping group_boxes(const ScoredBoxSet& set, double nt, std::size_t alpha) {
  Grouping grouping;
  grouping.alpha = alpha;

  std::vector<std::size_t> remaining(set.size());
  std::iota(remaining.begin(), remaining.end(), std::size_t{0});

  while (!remaining.empty()) {
    // remaining is in score order, so the first entry is the top box.
    const std::size_t top = remaining.front();
    std::vector<std::size_t> high;
    std::vector<std::size_t> low;
    for (const std::size_t idx : remaining) {
      if (set.o[idx][top] > nt) {
        high.push_back(idx);  // includes top itself (o_ii = 1 > nt)
      } else {
        low.push_back(idx);
      }
    }
    const std::size_t keep = std::min(high.size(), alpha);
    grouping.groups.emplace_back(high.begin(), high.begin() + keep);
    grouping.suppressed_overflow.insert(grouping.suppressed_overflow.end(),
                                        high.begin() + keep, high.end());
    remaining = std::move(low);
  }
  return grouping;
}

RescoreResult groomed_rescore(const ScoredBoxSet& set, const Grouping& grouping,
                              const PruneSpec& spec, double v) {
  RescoreResult result;
  result.r.assign(set.size(), 0.0);
  for (const auto& group : grouping.groups) {
    const std::size_t top = group.front();
    result.r[top] = clip01(set.s[top]);
    for (std::size_t k = 1; k < group.size(); ++k) {
      const std::size_t i = group[k];
      result.r[i] = clip01(set.s[i] - prune(spec, set.o[i][top]) * set.s[top]);
    }
  }
  // suppressed_overflow boxes keep r = 0.
  result.valid = select_valid(result.r, set.perm, v);
  return result;
}

RescoreResult groomed_rescore_full(const ScoredBoxSet& set, const PruneSpec& spec, double v) {
  const std::size_t n = set.size();
  RescoreResult result;
  result.r.assign(n, 0.0);
  // (I + P) rt = s with P strictly lower triangular: forward substitution.
  std::vector<double> rt(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = set.s[i];
    for (std::size_t j = 0; j < i; ++j) {
      acc -= prune(spec, set.o[i][j]) * rt[j];
    }
    rt[i] = acc;
  }
  for (std::size_t i = 0; i < n; ++i) result.r[i] = clip01(rt[i]);
  result.valid = select_valid(result.r, set.perm, v);
  return result;
}

RescoreResult reference_nms(const ScoredBoxSet& set, const PruneSpec& spec, double v) {
  const std::size_t n = set.size();
  RescoreResult result;
  result.r = set.s;

  std::vector<bool> remaining(n, true);
  std::size_t left = n;
  while (left > 0) {
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (remaining[i] && (best == n || result.r[i] > result.r[best])) best = i;
    }
    remaining[best] = false;
    --left;
    for (std::size_t i = 0; i < n; ++i) {
      if (remaining[i]) {
        result.r[i] *= 1.0 - prune(spec, set.o[best][i]);
      }
    }
  }
  result.valid = select_valid(result.r, set.perm, v);
  return result;
}

RescoreResult rescore_jacobians(const ScoredBoxSet& set, const Grouping& grouping,
                                const PruneSpec& spec, double v) {
  if (!spec.differentiable()) {
    throw std::invalid_argument("rescore_jacobians: hard pruning is not differentiable");
  }
  const std::size_t n = set.size();
  RescoreResult result = groomed_rescore(set, grouping, spec, v);
  result.jac_s.assign(n, std::vector<double>(n, 0.0));

  for (const auto& group : grouping.groups) {
    const std::size_t top = group.front();
    // Top box: r = clip(s_top); boundary counts as the open side.
    if (set.s[top] >= 0.0 && set.s[top] <= 1.0) {
      result.jac_s[top][top] = 1.0;
    }
    for (std::size_t k = 1; k < group.size(); ++k) {
      const std::size_t i = group[k];
      const double pre = set.s[i] - prune(spec, set.o[i][top]) * set.s[top];
      if (pre < 0.0 || pre > 1.0) continue;  // clip active: gradient gated to zero
      result.jac_s[i][i] = 1.0;
      result.jac_s[i][top] = -prune(spec, set.o[i][top]);
      result.jac_o.push_back({i, top, -prune_derivative(spec, set.o[i][top]) * set.s[top]});
    }
  }
  return result;
}

std::vector<std::size_t> select_valid(const std::vector<double>& r,
                                      const std::vector<std::size_t>& perm, double v) {
  std::vector<std::size_t> valid;
  for (std::size_t k = 0; k < r.size(); ++k) {
    if (r[k] >= v) valid.push_back(k < perm.size() ? perm[k] : k);
  }
  std::sort(valid.begin(), valid.end());
  return valid;
}

}  // namespace mono3d::nms
