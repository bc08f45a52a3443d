#include "mono3d/equivariance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mono3d::equivariance {

namespace {

double bilinear_clamped(const Image2D& img, double x, double y) {
  // x indexes columns, y rows; edge-clamped.
  const double max_x = static_cast<double>(img.width - 1);
  const double max_y = static_cast<double>(img.height - 1);
  x = std::clamp(x, 0.0, max_x);
  y = std::clamp(y, 0.0, max_y);
  const std::size_t x0 = static_cast<std::size_t>(x);
  const std::size_t y0 = static_cast<std::size_t>(y);
  const std::size_t x1 = std::min<std::size_t>(x0 + 1, img.width - 1);
  const std::size_t y1 = std::min<std::size_t>(y0 + 1, img.height - 1);
  const double fx = x - static_cast<double>(x0);
  const double fy = y - static_cast<double>(y0);
  const double top = (1.0 - fx) * img.at(y0, x0) + fx * img.at(y0, x1);
  const double bot = (1.0 - fx) * img.at(y1, x0) + fx * img.at(y1, x1);
  return (1.0 - fy) * top + fy * bot;
}

Image2D basis_with_gain(double sigma, int n, int m, std::size_t size, double gain) {
  if (size % 2 == 0) throw std::invalid_argument("steerable_basis: size must be odd");
  if (n < 0 || m < 0) throw std::invalid_argument("steerable_basis: orders must be >= 0");
  if (!(sigma > 0.0)) throw std::invalid_argument("steerable_basis: sigma must be > 0");
  Image2D filt(size, size);
  const double c = 0.5 * static_cast<double>(size - 1);
  for (std::size_t row = 0; row < size; ++row) {
    const double v = static_cast<double>(row) - c;
    for (std::size_t col = 0; col < size; ++col) {
      const double u = static_cast<double>(col) - c;
      filt.at(row, col) = gain / (sigma * sigma) * hermite(n, u / sigma) *
                          hermite(m, v / sigma) * std::exp(-(u * u + v * v) / (sigma * sigma));
    }
  }
  return filt;
}

}  // namespace

double Image2D::l2_norm() const {
  double acc = 0.0;
  for (const double x : data) acc += x * x;
  return std::sqrt(acc);
}

double hermite(int n, double x) {
  if (n < 0) throw std::invalid_argument("hermite: order must be >= 0");
  double prev = 1.0;  // He_0
  if (n == 0) return prev;
  double cur = x;  // He_1
  for (int k = 1; k < n; ++k) {
    const double next = x * cur - static_cast<double>(k) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

Image2D steerable_basis_raw(double sigma, int n, int m, std::size_t size) {
  return basis_with_gain(sigma, n, m, size, 1.0);
}

Image2D steerable_basis(double sigma, int n, int m, std::size_t size) {
  Image2D filt = basis_with_gain(sigma, n, m, size, 1.0);
  const double norm = filt.l2_norm();
  if (norm <= 0.0) throw std::invalid_argument("steerable_basis: filter vanished");
  for (double& x : filt.data) x /= norm;
  return filt;
}

std::size_t ScaleFilterBank::member_count(int max_order) {
  return static_cast<std::size_t>((max_order + 1) * (max_order + 2) / 2);
}

ScaleFilterBank ScaleFilterBank::make(std::vector<double> scales, std::size_t size,
                                      int max_order, std::vector<double> weights) {
  if (scales.empty()) throw std::invalid_argument("ScaleFilterBank: need at least one scale");
  if (weights.size() != member_count(max_order)) {
    throw std::invalid_argument("ScaleFilterBank: one weight per basis member required");
  }
  ScaleFilterBank bank;
  bank.scales = std::move(scales);
  bank.size = size;
  bank.max_order = max_order;
  bank.weights = std::move(weights);

  const double sigma_ref = *std::max_element(bank.scales.begin(), bank.scales.end());
  std::vector<double> gains;
  for (int n = 0; n <= max_order; ++n) {
    for (int m = 0; n + m <= max_order; ++m) {
      const Image2D ref = steerable_basis_raw(sigma_ref, n, m, size);
      const double norm = ref.l2_norm();
      gains.push_back(norm > 0.0 ? 1.0 / norm : 1.0);
    }
  }
  for (const double sigma : bank.scales) {
    std::vector<Image2D> members;
    std::size_t idx = 0;
    for (int n = 0; n <= max_order; ++n) {
      for (int m = 0; n + m <= max_order; ++m) {
        Image2D filt = steerable_basis_raw(sigma, n, m, size);
        for (double& x : filt.data) x *= gains[idx];
        members.push_back(std::move(filt));
        ++idx;
      }
    }
    bank.basis.push_back(std::move(members));
  }
  return bank;
}

Image2D ScaleFilterBank::filter_at(std::size_t scale_idx) const {
  if (scale_idx >= basis.size()) throw std::out_of_range("filter_at: bad scale index");
  Image2D out(size, size);
  for (std::size_t m = 0; m < weights.size(); ++m) {
    const Image2D& member = basis[scale_idx][m];
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += weights[m] * member.data[i];
  }
  return out;
}

Image2D convolve(const Image2D& image, const Image2D& filter) {
  if (image.height < filter.height || image.width < filter.width) {
    throw std::invalid_argument("convolve: image smaller than filter");
  }
  const long kc = static_cast<long>(filter.height - 1) / 2;
  Image2D out(image.height, image.width);
  for (long y = 0; y < static_cast<long>(image.height); ++y) {
    for (long x = 0; x < static_cast<long>(image.width); ++x) {
      double acc = 0.0;
      for (long ky = 0; ky < static_cast<long>(filter.height); ++ky) {
        const long sy = y - (ky - kc);
        if (sy < 0 || sy >= static_cast<long>(image.height)) continue;
        for (long kx = 0; kx < static_cast<long>(filter.width); ++kx) {
          const long sx = x - (kx - kc);
          if (sx < 0 || sx >= static_cast<long>(image.width)) continue;
          acc += filter.at(static_cast<std::size_t>(ky), static_cast<std::size_t>(kx)) *
                 image.at(static_cast<std::size_t>(sy), static_cast<std::size_t>(sx));
        }
      }
      out.at(static_cast<std::size_t>(y), static_cast<std::size_t>(x)) = acc;
    }
  }
  return out;
}

std::vector<Image2D> ses_convolve(const Image2D& image, const ScaleFilterBank& bank) {
  std::vector<Image2D> stack;
  stack.reserve(bank.scales.size());
  for (std::size_t k = 0; k < bank.scales.size(); ++k) {
    stack.push_back(convolve(image, bank.filter_at(k)));
  }
  return stack;
}

Image2D scale_project(const std::vector<Image2D>& stack) {
  if (stack.empty()) throw std::invalid_argument("scale_project: empty stack");
  Image2D out = stack.front();
  for (std::size_t k = 1; k < stack.size(); ++k) {
    if (stack[k].height != out.height || stack[k].width != out.width) {
      throw std::invalid_argument("scale_project: shape mismatch");
    }
    for (std::size_t i = 0; i < out.data.size(); ++i) {
      out.data[i] = std::max(out.data[i], stack[k].data[i]);
    }
  }
  return out;
}

Image2D rescale(const Image2D& image, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("rescale: scale must be > 0");
  const double cx = 0.5 * static_cast<double>(image.width - 1);
  const double cy = 0.5 * static_cast<double>(image.height - 1);
  Image2D out(image.height, image.width);
  out.spacing = image.spacing;
  for (std::size_t row = 0; row < image.height; ++row) {
    for (std::size_t col = 0; col < image.width; ++col) {
      const double x = cx + (static_cast<double>(col) - cx) / s;
      const double y = cy + (static_cast<double>(row) - cy) / s;
      out.at(row, col) = bilinear_clamped(image, x, y);
    }
  }
  return out;
}

EquivarianceError equivariance_error(const std::function<Image2D(const Image2D&)>& net,
                                     const std::vector<Image2D>& images,
                                     const std::vector<double>& scales) {
  EquivarianceError result;
  result.per_scale.assign(scales.size(), 0.0);
  std::vector<std::size_t> counts(scales.size(), 0);

  for (std::size_t si = 0; si < scales.size(); ++si) {
    const double s = scales[si];
    for (const Image2D& img : images) {
      const Image2D reference = rescale(net(img), s);
      const Image2D probe = net(rescale(img, s));
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < reference.data.size(); ++i) {
        const double d = reference.data[i] - probe.data[i];
        num += d * d;
        den += reference.data[i] * reference.data[i];
      }
      if (den <= 0.0) {
        ++result.skipped;
        continue;
      }
      result.per_scale[si] += num / den;
      ++counts[si];
    }
  }
  double total = 0.0;
  std::size_t total_count = 0;
  for (std::size_t si = 0; si < scales.size(); ++si) {
    total += result.per_scale[si];
    total_count += counts[si];
    result.per_scale[si] = counts[si] > 0 ? result.per_scale[si] / counts[si] : 0.0;
  }
  result.delta = total_count > 0 ? total / static_cast<double>(total_count) : 0.0;
  return result;
}

EquivarianceError ses_equivariance_error(const ScaleFilterBank& bank,
                                         const std::vector<Image2D>& images,
                                         const std::vector<double>& scales) {
  EquivarianceError result;
  result.per_scale.assign(scales.size(), 0.0);
  std::vector<std::size_t> counts(scales.size(), 0);

  for (std::size_t si = 0; si < scales.size(); ++si) {
    const double s = scales[si];
    // Slice pairs (k, j) with sigma_j = sigma_k / s, both in the bank.
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t k = 0; k < bank.scales.size(); ++k) {
      for (std::size_t j = 0; j < bank.scales.size(); ++j) {
        if (std::fabs(bank.scales[k] / s - bank.scales[j]) < 1e-9 * bank.scales[j]) {
          pairs.emplace_back(k, j);
        }
      }
    }
    if (pairs.empty()) {
      throw std::invalid_argument("ses_equivariance_error: no aligned slice pair for scale");
    }
    for (const Image2D& img : images) {
      for (const auto& [k, j] : pairs) {
        const Image2D probe = convolve(rescale(img, s), bank.filter_at(k));
        const Image2D reference = rescale(convolve(img, bank.filter_at(j)), s);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < reference.data.size(); ++i) {
          const double d = reference.data[i] - probe.data[i];
          num += d * d;
          den += reference.data[i] * reference.data[i];
        }
        if (den <= 0.0) {
          ++result.skipped;
          continue;
        }
        result.per_scale[si] += num / den;
        ++counts[si];
      }
    }
  }
  double total = 0.0;
  std::size_t total_count = 0;
  for (std::size_t si = 0; si < scales.size(); ++si) {
    total += result.per_scale[si];
    total_count += counts[si];
    result.per_scale[si] = counts[si] > 0 ? result.per_scale[si] / counts[si] : 0.0;
  }
  result.delta = total_count > 0 ? total / static_cast<double>(total_count) : 0.0;
  return result;
}

namespace {

void check_center(const Image2D& image, const LogPolarSpec& spec) {
  if (!(spec.cu > 0.0) || !(spec.cu < static_cast<double>(image.width - 1)) ||
      !(spec.cv > 0.0) || !(spec.cv < static_cast<double>(image.height - 1))) {
    throw std::invalid_argument("log_polar: center must lie strictly inside the image");
  }
}

double corner_radius(const Image2D& image, const LogPolarSpec& spec) {
  const double w = static_cast<double>(image.width - 1);
  const double h = static_cast<double>(image.height - 1);
  double r = 0.0;
  for (const auto& [x, y] : {std::pair{0.0, 0.0}, {w, 0.0}, {0.0, h}, {w, h}}) {
    r = std::max(r, std::hypot(x - spec.cu, y - spec.cv));
  }
  return r;
}

}  // namespace

Image2D log_polar(const Image2D& image, const LogPolarSpec& spec, std::size_t out_h,
                  std::size_t out_w) {
  check_center(image, spec);
  if (out_h == 0) out_h = image.height;
  if (out_w == 0) out_w = image.width;
  const double r_max = spec.r_max > 0.0 ? spec.r_max : corner_radius(image, spec);
  const double log_min = std::log(spec.r_min);
  const double log_step = (std::log(r_max) - log_min) / static_cast<double>(out_h - 1);
  const double theta_step = 2.0 * std::numbers::pi / static_cast<double>(out_w);

  Image2D out(out_h, out_w);
  for (std::size_t row = 0; row < out_h; ++row) {
    const double r = std::exp(log_min + log_step * static_cast<double>(row));
    for (std::size_t col = 0; col < out_w; ++col) {
      const double theta = theta_step * static_cast<double>(col);
      const double x = spec.cu + r * std::cos(theta);
      const double y = spec.cv + r * std::sin(theta);
      out.at(row, col) = bilinear_clamped(image, x, y);
    }
  }
  return out;
}

Image2D log_polar_inverse(const Image2D& lp, const LogPolarSpec& spec, std::size_t out_h,
                          std::size_t out_w) {
  if (out_h < 2 || out_w < 2) throw std::invalid_argument("log_polar_inverse: bad output size");
  Image2D probe(out_h, out_w);
  check_center(probe, spec);
  const double r_max = spec.r_max > 0.0 ? spec.r_max : corner_radius(probe, spec);
  const double log_min = std::log(spec.r_min);
  const double log_step = (std::log(r_max) - log_min) / static_cast<double>(lp.height - 1);
  const double theta_step = 2.0 * std::numbers::pi / static_cast<double>(lp.width);

  Image2D out(out_h, out_w);
  for (std::size_t row = 0; row < out_h; ++row) {
    for (std::size_t col = 0; col < out_w; ++col) {
      const double dx = static_cast<double>(col) - spec.cu;
      const double dy = static_cast<double>(row) - spec.cv;
      const double r = std::max(std::hypot(dx, dy), spec.r_min);
      double theta = std::atan2(dy, dx);
      if (theta < 0.0) theta += 2.0 * std::numbers::pi;

      const double fr = (std::log(r) - log_min) / log_step;
      const double ft = theta / theta_step;
      // Bilinear with wrap-around in the angular direction.
      const double fr_c = std::clamp(fr, 0.0, static_cast<double>(lp.height - 1));
      const std::size_t r0 = static_cast<std::size_t>(fr_c);
      const std::size_t r1 = std::min<std::size_t>(r0 + 1, lp.height - 1);
      const double wr = fr_c - static_cast<double>(r0);
      const std::size_t t0 = static_cast<std::size_t>(ft) % lp.width;
      const std::size_t t1 = (t0 + 1) % lp.width;
      const double wt = ft - std::floor(ft);
      const double top = (1.0 - wt) * lp.at(r0, t0) + wt * lp.at(r0, t1);
      const double bot = (1.0 - wt) * lp.at(r1, t0) + wt * lp.at(r1, t1);
      out.at(row, col) = (1.0 - wr) * top + wr * bot;
    }
  }
  return out;
}

double ssim(const Image2D& a, const Image2D& b, double dynamic_range) {
  if (a.height != b.height || a.width != b.width) {
    throw std::invalid_argument("ssim: shape mismatch");
  }
  const double c1 = (0.01 * dynamic_range) * (0.01 * dynamic_range);
  const double c2 = (0.03 * dynamic_range) * (0.03 * dynamic_range);
  const std::size_t win = 8;
  const std::size_t stride = 4;
  if (a.height < win || a.width < win) throw std::invalid_argument("ssim: image too small");

  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t y = 0; y + win <= a.height; y += stride) {
    for (std::size_t x = 0; x + win <= a.width; x += stride) {
      double ma = 0.0, mb = 0.0;
      for (std::size_t i = 0; i < win; ++i)
        for (std::size_t j = 0; j < win; ++j) {
          ma += a.at(y + i, x + j);
          mb += b.at(y + i, x + j);
        }
      const double n = static_cast<double>(win * win);
      ma /= n;
      mb /= n;
      double va = 0.0, vb = 0.0, cov = 0.0;
      for (std::size_t i = 0; i < win; ++i)
        for (std::size_t j = 0; j < win; ++j) {
          const double da = a.at(y + i, x + j) - ma;
          const double db = b.at(y + i, x + j) - mb;
          va += da * da;
          vb += db * db;
          cov += da * db;
        }
      va /= n - 1.0;
      vb /= n - 1.0;
      cov /= n - 1.0;
      acc += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) /
             ((ma * ma + mb * mb + c1) * (va + vb + c2));
      ++count;
    }
  }
  return acc / static_cast<double>(count);
}

}  // namespace mono3d::equivariance
