#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace mono3d::equivariance {

struct Image2D {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> data;  // row-major
  double spacing = 1.0;

  Image2D() = default;
  Image2D(std::size_t h, std::size_t w, double fill = 0.0)
      : height(h), width(w), data(h * w, fill) {}

  double& at(std::size_t row, std::size_t col) { return data[row * width + col]; }
  double at(std::size_t row, std::size_t col) const { return data[row * width + col]; }
  double l2_norm() const;
};

/// Probabilist's Hermite polynomial He_n(x).
double hermite(int n, double x);

/// Steerable filter psi_{sigma n m}(u, v) =
///   (A / sigma^2) He_n(u/sigma) He_m(v/sigma) exp(-(u^2+v^2)/sigma^2)
/// sampled on an odd k x k grid. A normalizes this filter to unit L2.
/// n indexes the horizontal factor, m the vertical one.
Image2D steerable_basis(double sigma, int n, int m, std::size_t size);

/// Same filter with A = 1 (the raw 1/sigma^2 family used inside a
/// filter bank, where the normalization must not depend on sigma).
Image2D steerable_basis_raw(double sigma, int n, int m, std::size_t size);

/// Multi-scale steerable filter bank: the same weight vector combines
/// the (n, m) basis members at every scale. Each (n, m) family shares
/// one normalization constant, fixed at the largest scale, so that the
/// scale-equivariance identity is preserved across the bank.
class ScaleFilterBank {
 public:
  static ScaleFilterBank make(std::vector<double> scales, std::size_t size, int max_order,
                              std::vector<double> weights);
  /// Basis members are the (n, m) pairs with n + m <= max_order.
  static std::size_t member_count(int max_order);

  /// Combined k x k filter at one scale: sum_m w_m psi_m.
  Image2D filter_at(std::size_t scale_idx) const;

  std::vector<double> scales;  // sigma values
  std::size_t size = 7;
  int max_order = 3;
  std::vector<double> weights;
  std::vector<std::vector<Image2D>> basis;  // [scale][member]
};

/// True 2D convolution with zero same-padding, one output per scale.
/// Throws when the image is smaller than the filter.
std::vector<Image2D> ses_convolve(const Image2D& image, const ScaleFilterBank& bank);

Image2D convolve(const Image2D& image, const Image2D& filter);

/// Elementwise max across the scale dimension.
Image2D scale_project(const std::vector<Image2D>& stack);

/// Scale transformation T_s: out(u, v) = in((u-cu)/s, (v-cv)/s) with
/// bilinear interpolation about the image center, edges clamped.
/// s < 1 shrinks the content.
Image2D rescale(const Image2D& image, double s);

struct EquivarianceError {
  double delta = 0.0;                // mean over all (image, scale) pairs
  std::vector<double> per_scale;     // mean over images, per scale
  std::size_t skipped = 0;           // all-zero reference maps excluded
};

/// Delta = mean ||T_s phi(h) - phi(T_s h)||^2 / ||T_s phi(h)||^2.
EquivarianceError equivariance_error(const std::function<Image2D(const Image2D&)>& net,
                                     const std::vector<Image2D>& images,
                                     const std::vector<double>& scales);

/// Equivariance error of the multi-scale stack itself: rescaling the
/// image shifts features along the scale axis, so slice sigma_k of the
/// probe is compared against slice sigma_k / s of the reference.
/// Throws when the bank holds no aligned slice pair for a scale.
EquivarianceError ses_equivariance_error(const ScaleFilterBank& bank,
                                         const std::vector<Image2D>& images,
                                         const std::vector<double>& scales);

/// Log-polar transform about (cu, cv): rows sample ln r uniformly in
/// [ln r_min, ln r_max], columns sample the angle in [0, 2 pi). The
/// center must lie strictly inside the image.
struct LogPolarSpec {
  double cu = 0.0;
  double cv = 0.0;
  double r_min = 1.0;
  double r_max = 0.0;  // <= 0 means the max corner distance
};

Image2D log_polar(const Image2D& image, const LogPolarSpec& spec, std::size_t out_h = 0,
                  std::size_t out_w = 0);
Image2D log_polar_inverse(const Image2D& lp, const LogPolarSpec& spec, std::size_t out_h,
                          std::size_t out_w);

/// Mean structural similarity over 8x8 windows (stride 4), dynamic
/// range L.
double ssim(const Image2D& a, const Image2D& b, double dynamic_range = 1.0);

}  // namespace mono3d::equivariance
