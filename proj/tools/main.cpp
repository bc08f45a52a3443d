#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mono3d/box_io.hpp"
#include "mono3d/depth_geometry.hpp"
#include "mono3d/equivariance.hpp"
#include "mono3d/geometry.hpp"
#include "mono3d/loss_analysis.hpp"
#include "mono3d/nms.hpp"
#include "mono3d/rng.hpp"
#include "mono3d/target_loss.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string resolve_output(const std::string& given, const std::string& fallback_name) {
  if (!given.empty()) return given;
  std::filesystem::path dir = ".";
  if (const char* env = std::getenv("MONO3D_OUT_DIR"); env != nullptr && *env != '\0') {
    dir = env;
  }
  return (dir / fallback_name).string();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
}

mono3d::nms::PruneKind parse_prune(const std::string& name) {
  using mono3d::nms::PruneKind;
  if (name == "hard") return PruneKind::hard;
  if (name == "linear") return PruneKind::linear;
  if (name == "exponential") return PruneKind::exponential;
  if (name == "sigmoidal") return PruneKind::sigmoidal;
  throw CLI::ValidationError("--prune", "unknown pruning kind: " + name);
}

// Values from --config fill every option the command line left unset.
class ConfigOverlay {
 public:
  void bind(CLI::Option* opt, const std::string& key, std::function<void(const nlohmann::json&)> apply) {
    bindings_.push_back({opt, key, std::move(apply)});
  }

  void load(const std::string& path) const {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::runtime_error(std::string("config JSON: ") + e.what());
    }
    for (const auto& b : bindings_) {
      if (b.opt->count() == 0 && doc.contains(b.key)) b.apply(doc.at(b.key));
    }
  }

 private:
  struct Binding {
    CLI::Option* opt;
    std::string key;
    std::function<void(const nlohmann::json&)> apply;
  };
  std::vector<Binding> bindings_;
};

// ---------------------------------------------------------------------------
// nms-compare

struct NmsCompareArgs {
  std::string boxes_path;
  std::string output;
  std::string config;
  std::string prune = "linear";
  double nt = mono3d::nms::kDefaultNt;
  double tau = 0.5;
  double valid = mono3d::nms::kDefaultValid;
  std::size_t alpha = mono3d::nms::kDefaultAlpha;
};

int run_nms_compare(const NmsCompareArgs& args) {
  namespace nms = mono3d::nms;

  const auto boxes = mono3d::box_io::read_boxes_json(args.boxes_path);
  const auto set = nms::ScoredBoxSet::from_boxes(boxes);

  nms::PruneSpec chosen{parse_prune(args.prune), args.nt, args.tau};
  nms::PruneSpec hard{nms::PruneKind::hard, args.nt, std::nullopt};
  nms::PruneSpec soft = chosen.kind == nms::PruneKind::hard
                            ? nms::PruneSpec{nms::PruneKind::linear, args.nt, std::nullopt}
                            : chosen;

  const auto classical = nms::reference_nms(set, hard, args.valid);
  const auto softened = nms::reference_nms(set, soft, args.valid);
  const auto grouping = nms::group_boxes(set, args.nt, args.alpha);
  const auto groomed = nms::groomed_rescore(set, grouping, chosen, args.valid);

  // Map sorted-order results back to the original box ids.
  const std::size_t n = set.size();
  std::vector<std::size_t> inverse(n);
  for (std::size_t k = 0; k < n; ++k) inverse[set.perm[k]] = k;

  std::ostringstream csv;
  csv << "box_id,score,rescore_classical,rescore_soft,rescore_groomed,kept\n";
  for (std::size_t id = 0; id < n; ++id) {
    const std::size_t k = inverse[id];
    const bool kept = groomed.r[k] >= args.valid;
    csv << id << ',' << fmt(boxes[id].score) << ',' << fmt(classical.r[k]) << ','
        << fmt(softened.r[k]) << ',' << fmt(groomed.r[k]) << ',' << (kept ? 1 : 0) << '\n';
  }
  const std::string out_path = resolve_output(args.output, "nms_compare.csv");
  write_file(out_path, csv.str());

  std::cout << "nms-compare: " << n << " boxes, " << grouping.groups.size() << " groups, "
            << groomed.valid.size() << " kept (v=" << fmt(args.valid) << ") -> " << out_path
            << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// convergence-sim

struct ConvergenceArgs {
  double sigma = 1.0;
  double ell = 4.0;
  std::size_t trials = 10000;
  std::size_t samples = 1000000;
  std::size_t steps = 1000;
  std::size_t dim = 4;
  std::uint64_t seed = 0;
  std::string output;
  std::string config;
};

int run_convergence_sim(const ConvergenceArgs& args) {
  namespace la = mono3d::loss_analysis;

  std::ostringstream csv;
  csv << "kind,sigma,ell,var_closed,var_mc,var_mc_se,sim_deviation\n";
  std::cout << "convergence-sim: sigma=" << fmt(args.sigma) << " ell=" << fmt(args.ell)
            << " trials=" << args.trials << "\n";
  for (const la::LossKind kind : {la::LossKind::l1, la::LossKind::l2, la::LossKind::dice}) {
    const la::NoiseLossSpec spec{kind, args.sigma, args.ell};
    const double closed = la::var_closed_form(spec);
    const auto mc = la::var_monte_carlo(spec, args.samples,
                                        mono3d::rng::sub_seed(args.seed, static_cast<int>(kind)));
    la::SgdSimConfig config;
    config.dim = args.dim;
    config.steps = args.steps;
    config.trials = args.trials;
    config.seed = mono3d::rng::sub_seed(args.seed, 100 + static_cast<int>(kind));
    const auto sim = la::sgd_convergence_sim(spec, config);

    csv << la::to_string(kind) << ',' << fmt(args.sigma) << ',' << fmt(args.ell) << ','
        << fmt(closed) << ',' << fmt(mc.variance) << ',' << fmt(mc.std_error) << ','
        << fmt(sim.mean_sq_deviation) << '\n';
    std::cout << "  " << la::to_string(kind) << ": Var(eps) closed=" << fmt(closed)
              << " mc=" << fmt(mc.variance) << " deviation=" << fmt(sim.mean_sq_deviation)
              << "\n";
  }
  const std::string out_path = resolve_output(args.output, "convergence_sim.csv");
  write_file(out_path, csv.str());
  std::cout << "  critical sigma(ell=" << fmt(args.ell)
            << ") = " << fmt(la::critical_sigma(args.ell)) << " -> " << out_path << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// depth-trend

struct DepthTrendArgs {
  double dh_min = -0.7;
  double dh_max = 0.76;
  std::size_t steps = 20;
  std::size_t trials = 2000;
  double sigma = 0.5;
  double f = 707.0;
  double cu = 600.0;
  double cv = 180.0;
  double height = 1.65;
  double image_h = 375.0;
  double beta = 0.0;
  std::uint64_t seed = 0;
  std::string output;
  std::string config;
};

int run_depth_trend(const DepthTrendArgs& args) {
  namespace dg = mono3d::depth_geometry;

  dg::CameraModel cam;
  cam.f = args.f;
  cam.cu = args.cu;
  cam.cv = args.cv;
  cam.height = args.height;
  cam.image_h = args.image_h;

  dg::TrendSimConfig config;
  config.trials = args.trials;
  config.noise_sigma = args.sigma;
  config.beta = args.beta;
  config.seed = args.seed;
  if (args.steps < 2) throw CLI::ValidationError("--steps", "need at least 2 steps");
  for (std::size_t i = 0; i < args.steps; ++i) {
    config.height_deltas.push_back(args.dh_min + (args.dh_max - args.dh_min) *
                                                     static_cast<double>(i) /
                                                     static_cast<double>(args.steps - 1));
  }

  const auto rows = dg::trend_sim(cam, config);
  std::ostringstream csv;
  csv << "dh,mean_err_ground,mean_err_regressed,mean_err_merged,se\n";
  for (const auto& row : rows) {
    const double se = std::max({row.se_ground, row.se_regressed, row.se_merged});
    csv << fmt(row.dh) << ',' << fmt(row.mean_err_ground) << ',' << fmt(row.mean_err_regressed)
        << ',' << fmt(row.mean_err_merged) << ',' << fmt(se) << '\n';
  }
  const std::string out_path = resolve_output(args.output, "depth_trend.csv");
  write_file(out_path, csv.str());

  std::cout << "depth-trend: " << rows.size() << " height deltas in [" << fmt(args.dh_min)
            << ", " << fmt(args.dh_max) << "], ground slope "
            << (rows.back().mean_err_ground > rows.front().mean_err_ground ? "positive"
                                                                           : "negative")
            << ", regressed slope "
            << (rows.back().mean_err_regressed < rows.front().mean_err_regressed ? "negative"
                                                                                 : "positive")
            << " -> " << out_path << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// equivariance-check

struct EquivarianceArgs {
  std::string scales = "0.833333333,0.909090909,1.0";
  std::size_t size = 7;
  std::size_t images = 20;
  std::size_t image_size = 64;
  double base_sigma = 1.7;
  int order = 3;
  std::uint64_t seed = 0;
  std::string output;
  std::string config;
};

std::vector<double> parse_scales(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  if (out.empty()) throw CLI::ValidationError("--scales", "no scales given");
  return out;
}

mono3d::equivariance::Image2D toy_blob_image(std::size_t size, std::uint64_t seed) {
  namespace eq = mono3d::equivariance;
  auto gen = mono3d::rng::engine(seed);
  std::uniform_real_distribution<double> pos(0.3, 0.7);
  std::uniform_real_distribution<double> width(2.5, 6.0);
  std::uniform_real_distribution<double> amp(0.5, 1.0);

  eq::Image2D img(size, size);
  const int blobs = 3;
  for (int b = 0; b < blobs; ++b) {
    const double cx = pos(gen) * static_cast<double>(size - 1);
    const double cy = pos(gen) * static_cast<double>(size - 1);
    const double s = width(gen);
    const double a = amp(gen);
    for (std::size_t row = 0; row < size; ++row) {
      for (std::size_t col = 0; col < size; ++col) {
        const double dx = static_cast<double>(col) - cx;
        const double dy = static_cast<double>(row) - cy;
        img.at(row, col) += a * std::exp(-(dx * dx + dy * dy) / (2.0 * s * s));
      }
    }
  }
  return img;
}

int run_equivariance_check(const EquivarianceArgs& args) {
  namespace eq = mono3d::equivariance;

  const auto scale_factors = parse_scales(args.scales);
  std::vector<double> sigmas;
  for (const double s : scale_factors) sigmas.push_back(s * args.base_sigma);

  const std::size_t members = eq::ScaleFilterBank::member_count(args.order);
  auto gen = mono3d::rng::engine(mono3d::rng::sub_seed(args.seed, 7));
  std::normal_distribution<double> unit(0.0, 1.0);
  std::vector<double> weights(members);
  for (double& w : weights) w = unit(gen);

  const auto bank = eq::ScaleFilterBank::make(sigmas, args.size, args.order, weights);
  // Vanilla: one filter at the reference (largest) scale.
  std::size_t ref = 0;
  for (std::size_t k = 1; k < sigmas.size(); ++k) {
    if (sigmas[k] > sigmas[ref]) ref = k;
  }
  const eq::Image2D vanilla_filter = bank.filter_at(ref);

  const auto phi_vanilla = [&](const eq::Image2D& img) {
    return eq::convolve(img, vanilla_filter);
  };

  std::vector<eq::Image2D> images;
  for (std::size_t i = 0; i < args.images; ++i) {
    images.push_back(toy_blob_image(args.image_size, mono3d::rng::sub_seed(args.seed, 100 + i)));
  }

  std::ostringstream csv;
  csv << "scale,delta_ses,delta_vanilla\n";
  std::cout << "equivariance-check: " << args.images << " images, filter " << args.size << "x"
            << args.size << ", base sigma " << fmt(args.base_sigma) << "\n";
  for (const double s : scale_factors) {
    const auto ses = eq::ses_equivariance_error(bank, images, {s});
    const auto van = eq::equivariance_error(phi_vanilla, images, {s});
    csv << fmt(s) << ',' << fmt(ses.delta) << ',' << fmt(van.delta) << '\n';
    std::cout << "  scale " << fmt(s) << ": delta_ses=" << fmt(ses.delta)
              << " delta_vanilla=" << fmt(van.delta) << "\n";
  }
  const std::string out_path = resolve_output(args.output, "equivariance_check.csv");
  write_file(out_path, csv.str());
  std::cout << "  -> " << out_path << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// giou-table

struct GiouTableArgs {
  std::string boxes_path;
  std::string gts_path;
  double beta = 0.3;
  std::string output;
  std::string config;
};

int run_giou_table(const GiouTableArgs& args) {
  namespace geo = mono3d::geometry;
  namespace tl = mono3d::target_loss;

  const auto boxes = mono3d::box_io::read_boxes_json(args.boxes_path);
  const auto gts = mono3d::box_io::read_boxes_json(args.gts_path);
  const auto assignment = tl::assign_targets(boxes, gts, args.beta);

  std::vector<double> rescores(boxes.size());
  for (std::size_t i = 0; i < boxes.size(); ++i) rescores[i] = boxes[i].score;
  const double ap = tl::average_precision(rescores, assignment.labels);

  // Rank of each box under descending rescores (stable).
  std::vector<std::size_t> order(boxes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rescores[a] > rescores[b]; });
  std::vector<std::size_t> rank(boxes.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r + 1;

  std::ostringstream csv;
  csv << "box_id,rescore,label,rank,matched_gt,iou2d,iou3d,giou3d,quality,ap\n";
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    // Report overlaps against the matched gt, or the best-quality one.
    long gt_idx = assignment.matched_gt[i].has_value()
                      ? static_cast<long>(*assignment.matched_gt[i])
                      : -1;
    double o2 = 0.0, o3 = 0.0, g3 = 0.0;
    if (gt_idx < 0 && !gts.empty()) {
      std::size_t best = 0;
      double best_q = -1.0;
      for (std::size_t l = 0; l < gts.size(); ++l) {
        const double q = tl::quality(boxes[i], gts[l]);
        if (q > best_q) {
          best_q = q;
          best = l;
        }
      }
      o2 = geo::iou2d(boxes[i].box2d, gts[best].box2d);
      o3 = geo::iou3d(boxes[i], gts[best]);
      g3 = geo::giou3d(boxes[i], gts[best]);
    } else if (gt_idx >= 0) {
      const auto& g = gts[static_cast<std::size_t>(gt_idx)];
      o2 = geo::iou2d(boxes[i].box2d, g.box2d);
      o3 = geo::iou3d(boxes[i], g);
      g3 = geo::giou3d(boxes[i], g);
    }
    csv << i << ',' << fmt(rescores[i]) << ',' << assignment.labels[i] << ',' << rank[i] << ','
        << gt_idx << ',' << fmt(o2) << ',' << fmt(o3) << ',' << fmt(g3) << ','
        << fmt(assignment.quality[i]) << ',' << fmt(ap) << '\n';
  }
  const std::string out_path = resolve_output(args.output, "giou_table.csv");
  write_file(out_path, csv.str());

  int positives = 0;
  for (const int l : assignment.labels) positives += l;
  std::cout << "giou-table: " << boxes.size() << " boxes, " << gts.size() << " gts, "
            << positives << " positives, AP=" << fmt(ap) << " -> " << out_path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical core for monocular 3D detection experiments"};
  app.require_subcommand(1);

  // nms-compare ------------------------------------------------------------
  NmsCompareArgs nms_args;
  ConfigOverlay nms_cfg;
  auto* nms_cmd = app.add_subcommand("nms-compare",
                                     "Classical / soft / grouped matrix NMS on a box file");
  auto* nms_boxes = nms_cmd->add_option("--boxes", nms_args.boxes_path, "Box JSON file");
  auto* nms_nt = nms_cmd->add_option("--nt", nms_args.nt, "NMS overlap threshold");
  auto* nms_prune = nms_cmd->add_option("--prune", nms_args.prune,
                                        "Pruning kind: hard|linear|exponential|sigmoidal");
  auto* nms_tau = nms_cmd->add_option("--tau", nms_args.tau, "Temperature");
  auto* nms_valid = nms_cmd->add_option("--valid", nms_args.valid, "Valid rescore threshold");
  auto* nms_alpha = nms_cmd->add_option("--alpha", nms_args.alpha, "Maximum group size");
  auto* nms_out = nms_cmd->add_option("-o,--output", nms_args.output, "Output CSV path");
  nms_cmd->add_option("--config", nms_args.config, "JSON config file (flags override)");
  nms_cfg.bind(nms_boxes, "boxes", [&](const nlohmann::json& v) { nms_args.boxes_path = v.get<std::string>(); });
  nms_cfg.bind(nms_nt, "nt", [&](const nlohmann::json& v) { nms_args.nt = v.get<double>(); });
  nms_cfg.bind(nms_prune, "prune", [&](const nlohmann::json& v) { nms_args.prune = v.get<std::string>(); });
  nms_cfg.bind(nms_tau, "tau", [&](const nlohmann::json& v) { nms_args.tau = v.get<double>(); });
  nms_cfg.bind(nms_valid, "valid", [&](const nlohmann::json& v) { nms_args.valid = v.get<double>(); });
  nms_cfg.bind(nms_alpha, "alpha", [&](const nlohmann::json& v) { nms_args.alpha = v.get<std::size_t>(); });
  nms_cfg.bind(nms_out, "output", [&](const nlohmann::json& v) { nms_args.output = v.get<std::string>(); });

  // convergence-sim ----------------------------------------------------------
  ConvergenceArgs conv_args;
  ConfigOverlay conv_cfg;
  auto* conv_cmd = app.add_subcommand("convergence-sim",
                                      "Gradient variance and SGD weight-deviation experiment");
  auto* conv_sigma = conv_cmd->add_option("--sigma", conv_args.sigma, "Noise std");
  auto* conv_ell = conv_cmd->add_option("--ell", conv_args.ell, "Object length");
  auto* conv_trials = conv_cmd->add_option("--trials", conv_args.trials, "SGD trials");
  auto* conv_samples = conv_cmd->add_option("--samples", conv_args.samples, "Monte-Carlo samples");
  auto* conv_steps = conv_cmd->add_option("--steps", conv_args.steps, "SGD steps per trial");
  auto* conv_dim = conv_cmd->add_option("--dim", conv_args.dim, "Feature dimension");
  auto* conv_seed = conv_cmd->add_option("--seed", conv_args.seed, "Random seed");
  auto* conv_out = conv_cmd->add_option("-o,--output", conv_args.output, "Output CSV path");
  conv_cmd->add_option("--config", conv_args.config, "JSON config file (flags override)");
  conv_cfg.bind(conv_sigma, "sigma", [&](const nlohmann::json& v) { conv_args.sigma = v.get<double>(); });
  conv_cfg.bind(conv_ell, "ell", [&](const nlohmann::json& v) { conv_args.ell = v.get<double>(); });
  conv_cfg.bind(conv_trials, "trials", [&](const nlohmann::json& v) { conv_args.trials = v.get<std::size_t>(); });
  conv_cfg.bind(conv_samples, "samples", [&](const nlohmann::json& v) { conv_args.samples = v.get<std::size_t>(); });
  conv_cfg.bind(conv_steps, "steps", [&](const nlohmann::json& v) { conv_args.steps = v.get<std::size_t>(); });
  conv_cfg.bind(conv_dim, "dim", [&](const nlohmann::json& v) { conv_args.dim = v.get<std::size_t>(); });
  conv_cfg.bind(conv_seed, "seed", [&](const nlohmann::json& v) { conv_args.seed = v.get<std::uint64_t>(); });
  conv_cfg.bind(conv_out, "output", [&](const nlohmann::json& v) { conv_args.output = v.get<std::string>(); });

  // depth-trend --------------------------------------------------------------
  DepthTrendArgs depth_args;
  ConfigOverlay depth_cfg;
  auto* depth_cmd = app.add_subcommand("depth-trend",
                                       "Depth-error trends under camera height changes");
  auto* d_min = depth_cmd->add_option("--dh-min", depth_args.dh_min, "Smallest height change");
  auto* d_max = depth_cmd->add_option("--dh-max", depth_args.dh_max, "Largest height change");
  auto* d_steps = depth_cmd->add_option("--steps", depth_args.steps, "Number of height deltas");
  auto* d_trials = depth_cmd->add_option("--trials", depth_args.trials, "Trials per delta");
  auto* d_sigma = depth_cmd->add_option("--sigma", depth_args.sigma, "Depth noise std");
  auto* d_f = depth_cmd->add_option("--f", depth_args.f, "Focal length (px)");
  auto* d_cu = depth_cmd->add_option("--cu", depth_args.cu, "Principal point u");
  auto* d_cv = depth_cmd->add_option("--cv", depth_args.cv, "Principal point v");
  auto* d_height = depth_cmd->add_option("--height", depth_args.height, "Camera height (m)");
  auto* d_image_h = depth_cmd->add_option("--image-h", depth_args.image_h, "Image height (px)");
  auto* d_beta = depth_cmd->add_option("--beta", depth_args.beta,
                                       "Regression slope (<= 0 uses the default)");
  auto* d_seed = depth_cmd->add_option("--seed", depth_args.seed, "Random seed");
  auto* d_out = depth_cmd->add_option("-o,--output", depth_args.output, "Output CSV path");
  depth_cmd->add_option("--config", depth_args.config, "JSON config file (flags override)");
  depth_cfg.bind(d_min, "dh_min", [&](const nlohmann::json& v) { depth_args.dh_min = v.get<double>(); });
  depth_cfg.bind(d_max, "dh_max", [&](const nlohmann::json& v) { depth_args.dh_max = v.get<double>(); });
  depth_cfg.bind(d_steps, "steps", [&](const nlohmann::json& v) { depth_args.steps = v.get<std::size_t>(); });
  depth_cfg.bind(d_trials, "trials", [&](const nlohmann::json& v) { depth_args.trials = v.get<std::size_t>(); });
  depth_cfg.bind(d_sigma, "sigma", [&](const nlohmann::json& v) { depth_args.sigma = v.get<double>(); });
  depth_cfg.bind(d_f, "f", [&](const nlohmann::json& v) { depth_args.f = v.get<double>(); });
  depth_cfg.bind(d_cu, "cu", [&](const nlohmann::json& v) { depth_args.cu = v.get<double>(); });
  depth_cfg.bind(d_cv, "cv", [&](const nlohmann::json& v) { depth_args.cv = v.get<double>(); });
  depth_cfg.bind(d_height, "height", [&](const nlohmann::json& v) { depth_args.height = v.get<double>(); });
  depth_cfg.bind(d_image_h, "image_h", [&](const nlohmann::json& v) { depth_args.image_h = v.get<double>(); });
  depth_cfg.bind(d_beta, "beta", [&](const nlohmann::json& v) { depth_args.beta = v.get<double>(); });
  depth_cfg.bind(d_seed, "seed", [&](const nlohmann::json& v) { depth_args.seed = v.get<std::uint64_t>(); });
  depth_cfg.bind(d_out, "output", [&](const nlohmann::json& v) { depth_args.output = v.get<std::string>(); });

  // equivariance-check ---------------------------------------------------------
  EquivarianceArgs eq_args;
  ConfigOverlay eq_cfg;
  auto* eq_cmd = app.add_subcommand("equivariance-check",
                                    "Scale-equivariance error of steerable vs vanilla filters");
  auto* e_scales = eq_cmd->add_option("--scales", eq_args.scales, "Comma-separated scale factors");
  auto* e_size = eq_cmd->add_option("--size", eq_args.size, "Filter size (odd)");
  auto* e_images = eq_cmd->add_option("--images", eq_args.images, "Number of toy images");
  auto* e_imsize = eq_cmd->add_option("--image-size", eq_args.image_size, "Toy image side");
  auto* e_sigma = eq_cmd->add_option("--base-sigma", eq_args.base_sigma, "Base filter sigma");
  auto* e_order = eq_cmd->add_option("--order", eq_args.order, "Maximum Hermite order n+m");
  auto* e_seed = eq_cmd->add_option("--seed", eq_args.seed, "Random seed");
  auto* e_out = eq_cmd->add_option("-o,--output", eq_args.output, "Output CSV path");
  eq_cmd->add_option("--config", eq_args.config, "JSON config file (flags override)");
  eq_cfg.bind(e_scales, "scales", [&](const nlohmann::json& v) { eq_args.scales = v.get<std::string>(); });
  eq_cfg.bind(e_size, "size", [&](const nlohmann::json& v) { eq_args.size = v.get<std::size_t>(); });
  eq_cfg.bind(e_images, "images", [&](const nlohmann::json& v) { eq_args.images = v.get<std::size_t>(); });
  eq_cfg.bind(e_imsize, "image_size", [&](const nlohmann::json& v) { eq_args.image_size = v.get<std::size_t>(); });
  eq_cfg.bind(e_sigma, "base_sigma", [&](const nlohmann::json& v) { eq_args.base_sigma = v.get<double>(); });
  eq_cfg.bind(e_order, "order", [&](const nlohmann::json& v) { eq_args.order = v.get<int>(); });
  eq_cfg.bind(e_seed, "seed", [&](const nlohmann::json& v) { eq_args.seed = v.get<std::uint64_t>(); });
  eq_cfg.bind(e_out, "output", [&](const nlohmann::json& v) { eq_args.output = v.get<std::string>(); });

  // giou-table -----------------------------------------------------------------
  GiouTableArgs giou_args;
  ConfigOverlay giou_cfg;
  auto* giou_cmd = app.add_subcommand("giou-table",
                                      "Target assignment quality table for boxes vs ground truths");
  auto* g_boxes = giou_cmd->add_option("--boxes", giou_args.boxes_path, "Box JSON file");
  auto* g_gts = giou_cmd->add_option("--gts", giou_args.gts_path, "Ground-truth JSON file");
  auto* g_beta = giou_cmd->add_option("--beta", giou_args.beta, "Positive-label threshold");
  auto* g_out = giou_cmd->add_option("-o,--output", giou_args.output, "Output CSV path");
  giou_cmd->add_option("--config", giou_args.config, "JSON config file (flags override)");
  giou_cfg.bind(g_boxes, "boxes", [&](const nlohmann::json& v) { giou_args.boxes_path = v.get<std::string>(); });
  giou_cfg.bind(g_gts, "gts", [&](const nlohmann::json& v) { giou_args.gts_path = v.get<std::string>(); });
  giou_cfg.bind(g_beta, "beta", [&](const nlohmann::json& v) { giou_args.beta = v.get<double>(); });
  giou_cfg.bind(g_out, "output", [&](const nlohmann::json& v) { giou_args.output = v.get<std::string>(); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (nms_cmd->parsed()) {
      nms_cfg.load(nms_args.config);
      if (nms_args.boxes_path.empty()) {
        std::cerr << "nms-compare: --boxes is required\n";
        return kExitUsage;
      }
      const auto kind = parse_prune(nms_args.prune);
      if ((kind == mono3d::nms::PruneKind::exponential ||
           kind == mono3d::nms::PruneKind::sigmoidal) &&
          !(nms_args.tau > 0.0)) {
        std::cerr << "nms-compare: --tau > 0 required for this pruning kind\n";
        return kExitUsage;
      }
      return run_nms_compare(nms_args);
    }
    if (conv_cmd->parsed()) {
      conv_cfg.load(conv_args.config);
      return run_convergence_sim(conv_args);
    }
    if (depth_cmd->parsed()) {
      depth_cfg.load(depth_args.config);
      return run_depth_trend(depth_args);
    }
    if (eq_cmd->parsed()) {
      eq_cfg.load(eq_args.config);
      return run_equivariance_check(eq_args);
    }
    if (giou_cmd->parsed()) {
      giou_cfg.load(giou_args.config);
      if (giou_args.boxes_path.empty() || giou_args.gts_path.empty()) {
        std::cerr << "giou-table: --boxes and --gts are required\n";
        return kExitUsage;
      }
      return run_giou_table(giou_args);
    }
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const std::runtime_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}
