#include "mono3d/loss_analysis.hpp"

#include <cmath>
#include <stdexcept>

#include "mono3d/rng.hpp"

namespace mono3d::loss_analysis {

namespace {

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::l1: return "l1";
    case LossKind::l2: return "l2";
    case LossKind::dice: return "dice";
  }
  return "unknown";
}

void NoiseLossSpec::validate() const {
  // sigma = 0 is the noiseless limit and every formula degrades gracefully.
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("NoiseLossSpec: sigma must be >= 0 and finite");
  }
  if (!(ell > 0.0)) throw std::invalid_argument("NoiseLossSpec: ell must be > 0");
}

double loss_value(const NoiseLossSpec& spec, double eta) {
  switch (spec.kind) {
    case LossKind::l1: return std::fabs(eta);
    case LossKind::l2: return 0.5 * eta * eta;
    case LossKind::dice: return std::fabs(eta) <= spec.ell ? std::fabs(eta) / spec.ell : 1.0;
  }
  throw std::invalid_argument("loss_value: unknown kind");
}

double loss_grad_wrt_noise(const NoiseLossSpec& spec, double eta) {
  switch (spec.kind) {
    case LossKind::l1: return sign(eta);
    case LossKind::l2: return eta;
    case LossKind::dice: return std::fabs(eta) <= spec.ell ? sign(eta) / spec.ell : 0.0;
  }
  throw std::invalid_argument("loss_grad_wrt_noise: unknown kind");
}

double var_closed_form(const NoiseLossSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case LossKind::l1: return 1.0;
    case LossKind::l2: return spec.sigma * spec.sigma;
    case LossKind::dice:
      return std::erf(spec.ell / (std::sqrt(2.0) * spec.sigma)) / (spec.ell * spec.ell);
  }
  throw std::invalid_argument("var_closed_form: unknown kind");
}

McVariance var_monte_carlo(const NoiseLossSpec& spec, std::size_t samples, std::uint64_t seed) {
  spec.validate();
  if (samples < 2) throw std::invalid_argument("var_monte_carlo: need at least 2 samples");

  auto gen = rng::engine(seed);
  std::normal_distribution<double> unit(0.0, 1.0);

  double sum = 0.0, sum2 = 0.0, sum4 = 0.0;
  std::vector<double> eps(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    eps[i] = loss_grad_wrt_noise(spec, spec.sigma * unit(gen));
    sum += eps[i];
  }
  const double n = static_cast<double>(samples);
  const double mean = sum / n;
  for (std::size_t i = 0; i < samples; ++i) {
    const double d = eps[i] - mean;
    sum2 += d * d;
    sum4 += d * d * d * d;
  }
  const double variance = sum2 / (n - 1.0);
  const double m2 = sum2 / n;
  const double m4 = sum4 / n;
  // Var(s^2) = (m4 - m2^2 (n-3)/(n-1)) / n for an i.i.d. sample.
  const double var_of_var = std::max(0.0, (m4 - m2 * m2 * (n - 3.0) / (n - 1.0)) / n);
  return {variance, std::sqrt(var_of_var)};
}

double inverse_erf(double y) {
  if (!(y > -1.0 && y < 1.0)) {
    throw std::invalid_argument("inverse_erf: argument must lie in (-1, 1)");
  }
  if (y == 0.0) return 0.0;
  double lo = 0.0, hi = 1.0;
  const double target = std::fabs(y);
  while (std::erf(hi) < target) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (std::erf(mid) < target ? lo : hi) = mid;
  }
  const double x = 0.5 * (lo + hi);
  return y > 0.0 ? x : -x;
}

double critical_sigma(double ell) {
  if (!(ell > 0.0)) throw std::invalid_argument("critical_sigma: ell must be > 0");

  // sigma^2 increases from 0 while the dice variance decreases, so the
  // crossing is unique; bracket then bisect.
  const auto dice_var = [ell](double sigma) {
    return std::erf(ell / (std::sqrt(2.0) * sigma)) / (ell * ell);
  };
  double lo = 1e-12;
  double hi = 1.0;
  while (hi * hi < dice_var(hi)) hi *= 2.0;
  while (lo * lo > dice_var(lo)) lo *= 0.5;
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mid * mid < dice_var(mid) ? lo : hi) = mid;
  }
  const double sigma_m = 0.5 * (lo + hi);

  if (ell >= 1.0) return sigma_m;  // Erf^-1(ell^2) only exists below 1
  const double second = std::sqrt(2.0) / ell * inverse_erf(ell * ell);
  return std::max(sigma_m, second);
}

bool SgdSimConfig::square_summable() const {
  return schedule == StepScheduleKind::harmonic || schedule == StepScheduleKind::inverse_square;
}

double SgdSimConfig::step_at(std::size_t j) const {
  const double jd = static_cast<double>(j);
  switch (schedule) {
    case StepScheduleKind::harmonic: return step_scale / jd;
    case StepScheduleKind::inverse_square: return step_scale / (jd * jd);
    case StepScheduleKind::inverse_sqrt: return step_scale / std::sqrt(jd);
    case StepScheduleKind::constant: return step_scale;
  }
  throw std::invalid_argument("step_at: unknown schedule");
}

double SgdSimConfig::sum_sq_steps() const {
  double acc = 0.0;
  for (std::size_t j = 1; j <= steps; ++j) {
    const double s = step_at(j);
    acc += s * s;
  }
  return acc;
}

SgdSimResult sgd_convergence_sim(const NoiseLossSpec& spec, const SgdSimConfig& config) {
  spec.validate();
  if (config.trials < 1) throw std::invalid_argument("sgd_convergence_sim: trials must be >= 1");
  if (!config.square_summable()) {
    throw std::invalid_argument("sgd_convergence_sim: step schedule is not square summable");
  }

  const std::size_t dim = config.dim;
  const double w_star = 1.0 / std::sqrt(static_cast<double>(dim));

  SgdSimResult result;
  result.per_trial.resize(config.trials);

  std::vector<double> w(dim);
  std::vector<double> h(dim);
  for (std::size_t trial = 0; trial < config.trials; ++trial) {
    auto gen = rng::engine(rng::sub_seed(config.seed, trial));
    std::normal_distribution<double> unit(0.0, 1.0);

    for (std::size_t d = 0; d < dim; ++d) w[d] = config.weight_init_sigma * unit(gen);
    for (std::size_t j = 1; j <= config.steps; ++j) {
      for (std::size_t d = 0; d < dim; ++d) h[d] = unit(gen);
      const double eta = spec.sigma * unit(gen);
      const double eps = loss_grad_wrt_noise(spec, eta);
      const double sj = config.step_at(j);
      for (std::size_t d = 0; d < dim; ++d) w[d] -= sj * h[d] * eps;
    }
    double dev = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      const double diff = w[d] - w_star;
      dev += diff * diff;
    }
    result.per_trial[trial] = dev;
  }

  double sum = 0.0;
  for (const double x : result.per_trial) sum += x;
  const double n = static_cast<double>(config.trials);
  result.mean_sq_deviation = sum / n;
  double ss = 0.0;
  for (const double x : result.per_trial) {
    const double d = x - result.mean_sq_deviation;
    ss += d * d;
  }
  result.std_error = config.trials > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  return result;
}

}  // namespace mono3d::loss_analysis
