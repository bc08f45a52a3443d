#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace mono3d::loss_analysis {

enum class LossKind { l1, l2, dice };

std::string to_string(LossKind kind);

/// Loss over additive depth noise eta ~ N(0, sigma^2) for an object of
/// length ell (the dice loss is the 1-D segment form).
struct NoiseLossSpec {
  LossKind kind = LossKind::dice;
  double sigma = 1.0;  // noise std, > 0
  double ell = 4.0;    // object length, > 0

  void validate() const;
};

/// Loss value L(eta): |eta| for l1, eta^2/2 for l2, and for dice
/// |eta|/ell inside the object, 1 outside.
double loss_value(const NoiseLossSpec& spec, double eta);

/// Gradient eps = dL/deta: sign(eta) for l1, eta for l2,
/// sign(eta)/ell on |eta| <= ell else 0 for dice.
double loss_grad_wrt_noise(const NoiseLossSpec& spec, double eta);

/// Closed-form Var(eps): 1 for l1, sigma^2 for l2,
/// (1/ell^2) Erf(ell / (sqrt(2) sigma)) for dice.
double var_closed_form(const NoiseLossSpec& spec);

struct McVariance {
  double variance = 0.0;
  double std_error = 0.0;
};

/// Unbiased sample variance of loss_grad_wrt_noise over eta draws,
/// with the standard error of the variance estimator.
McVariance var_monte_carlo(const NoiseLossSpec& spec, std::size_t samples, std::uint64_t seed);

/// Inverse error function on (-1, 1) via bisection on std::erf.
double inverse_erf(double y);

/// Critical noise level sigma_c = max(sigma_m, sqrt(2)/ell * Erf^-1(ell^2)),
/// where sigma_m solves sigma^2 = (1/ell^2) Erf(ell/(sqrt(2) sigma)).
/// The second term only exists for ell < 1. Bisection residual < 1e-9.
double critical_sigma(double ell);

enum class StepScheduleKind { harmonic, inverse_square, inverse_sqrt, constant };

struct SgdSimConfig {
  std::size_t dim = 4;        // feature dimension, h ~ N(0, I)
  std::size_t steps = 1000;   // schedule truncation
  StepScheduleKind schedule = StepScheduleKind::harmonic;
  double step_scale = 1.0;    // s_j = step_scale * base(j)
  std::size_t trials = 10000;
  std::uint64_t seed = 0;
  double weight_init_sigma = 0.5;  // per-component std of w_0 (mean 0)

  /// True when the infinite extension of the schedule is square
  /// summable (harmonic 1/j and inverse_square 1/j^2 are; 1/sqrt(j)
  /// and constant are not).
  bool square_summable() const;
  double step_at(std::size_t j) const;  // j counts from 1
  double sum_sq_steps() const;
  /// c1 = (sum s_j^2) * E(h^T h) for this configuration.
  double c1() const { return sum_sq_steps() * static_cast<double>(dim); }
  /// c2 = Var(w_0) + ||w*||^2 (w* has unit norm).
  double c2() const {
    return static_cast<double>(dim) * weight_init_sigma * weight_init_sigma + 1.0;
  }
};

struct SgdSimResult {
  double mean_sq_deviation = 0.0;
  double std_error = 0.0;
  std::vector<double> per_trial;
};

/// Simulates w_t = w_0 - sum_j s_j h_j eps_j against the optimum
/// w* = ones/sqrt(dim) and reports E||w_t - w*||^2. Throws for a
/// non-square-summable schedule.
SgdSimResult sgd_convergence_sim(const NoiseLossSpec& spec, const SgdSimConfig& config);

}  // namespace mono3d::loss_analysis
