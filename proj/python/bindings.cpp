#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mono3d/box_io.hpp"
#include "mono3d/depth_geometry.hpp"
#include "mono3d/equivariance.hpp"
#include "mono3d/geometry.hpp"
#include "mono3d/loss_analysis.hpp"
#include "mono3d/nms.hpp"
#include "mono3d/target_loss.hpp"

namespace py = pybind11;

using namespace mono3d;

namespace {

void bind_geometry(py::module_& m) {
  py::class_<geometry::Box2D>(m, "Box2D")
      .def(py::init<>())
      .def(py::init([](double x1, double y1, double x2, double y2) {
             return geometry::Box2D{x1, y1, x2, y2};
           }),
           py::arg("x1"), py::arg("y1"), py::arg("x2"), py::arg("y2"))
      .def_readwrite("x1", &geometry::Box2D::x1)
      .def_readwrite("y1", &geometry::Box2D::y1)
      .def_readwrite("x2", &geometry::Box2D::x2)
      .def_readwrite("y2", &geometry::Box2D::y2)
      .def("area", &geometry::Box2D::area);

  py::class_<geometry::Box3D>(m, "Box3D")
      .def(py::init<>())
      .def(py::init([](double cx, double cy, double cz, double l, double w, double h,
                       double yaw, double score, geometry::Box2D box2d) {
             return geometry::Box3D{cx, cy, cz, l, w, h, yaw, score, box2d};
           }),
           py::arg("cx"), py::arg("cy"), py::arg("cz"), py::arg("l"), py::arg("w"),
           py::arg("h"), py::arg("yaw") = 0.0, py::arg("score") = 0.0,
           py::arg("box2d") = geometry::Box2D{})
      .def_readwrite("cx", &geometry::Box3D::cx)
      .def_readwrite("cy", &geometry::Box3D::cy)
      .def_readwrite("cz", &geometry::Box3D::cz)
      .def_readwrite("l", &geometry::Box3D::l)
      .def_readwrite("w", &geometry::Box3D::w)
      .def_readwrite("h", &geometry::Box3D::h)
      .def_readwrite("yaw", &geometry::Box3D::yaw)
      .def_readwrite("score", &geometry::Box3D::score)
      .def_readwrite("box2d", &geometry::Box3D::box2d)
      .def("volume", &geometry::Box3D::volume);

  m.def("iou2d", &geometry::iou2d, py::arg("a"), py::arg("b"));
  m.def("iou3d", &geometry::iou3d, py::arg("a"), py::arg("b"));
  m.def("giou3d", &geometry::giou3d, py::arg("a"), py::arg("b"));
  m.def("voxel_iou3d_oracle", &geometry::voxel_iou3d_oracle, py::arg("a"), py::arg("b"),
        py::arg("resolution"));
}

void bind_nms(py::module_& m) {
  py::enum_<nms::PruneKind>(m, "PruneKind")
      .value("hard", nms::PruneKind::hard)
      .value("linear", nms::PruneKind::linear)
      .value("exponential", nms::PruneKind::exponential)
      .value("sigmoidal", nms::PruneKind::sigmoidal);

  py::class_<nms::PruneSpec>(m, "PruneSpec")
      .def(py::init([](nms::PruneKind kind, double nt, std::optional<double> tau) {
             return nms::PruneSpec{kind, nt, tau};
           }),
           py::arg("kind") = nms::PruneKind::linear, py::arg("nt") = nms::kDefaultNt,
           py::arg("tau") = std::nullopt)
      .def_readwrite("kind", &nms::PruneSpec::kind)
      .def_readwrite("nt", &nms::PruneSpec::nt)
      .def_readwrite("tau", &nms::PruneSpec::tau)
      .def("differentiable", &nms::PruneSpec::differentiable);

  py::class_<nms::ScoredBoxSet>(m, "ScoredBoxSet")
      .def_static("from_boxes", &nms::ScoredBoxSet::from_boxes, py::arg("boxes"))
      .def_static("from_scores", &nms::ScoredBoxSet::from_scores, py::arg("scores"),
                  py::arg("overlaps"))
      .def_readonly("s", &nms::ScoredBoxSet::s)
      .def_readonly("perm", &nms::ScoredBoxSet::perm)
      .def_readonly("o", &nms::ScoredBoxSet::o)
      .def("__len__", &nms::ScoredBoxSet::size);

  py::class_<nms::Grouping>(m, "Grouping")
      .def_readonly("groups", &nms::Grouping::groups)
      .def_readonly("alpha", &nms::Grouping::alpha)
      .def_readonly("suppressed_overflow", &nms::Grouping::suppressed_overflow);

  py::class_<nms::OverlapJacEntry>(m, "OverlapJacEntry")
      .def_readonly("i", &nms::OverlapJacEntry::i)
      .def_readonly("j", &nms::OverlapJacEntry::j)
      .def_readonly("value", &nms::OverlapJacEntry::value);

  py::class_<nms::RescoreResult>(m, "RescoreResult")
      .def_readonly("r", &nms::RescoreResult::r)
      .def_readonly("valid", &nms::RescoreResult::valid)
      .def_readonly("jac_s", &nms::RescoreResult::jac_s)
      .def_readonly("jac_o", &nms::RescoreResult::jac_o);

  m.def("prune", &nms::prune, py::arg("spec"), py::arg("overlap"));
  m.def("prune_derivative", &nms::prune_derivative, py::arg("spec"), py::arg("overlap"));
  m.def("group_boxes", &nms::group_boxes, py::arg("set"), py::arg("nt") = nms::kDefaultNt,
        py::arg("alpha") = nms::kDefaultAlpha);
  m.def("groomed_rescore", &nms::groomed_rescore, py::arg("set"), py::arg("grouping"),
        py::arg("spec"), py::arg("v") = nms::kDefaultValid);
  m.def("groomed_rescore_full", &nms::groomed_rescore_full, py::arg("set"), py::arg("spec"),
        py::arg("v") = nms::kDefaultValid);
  m.def("reference_nms", &nms::reference_nms, py::arg("set"), py::arg("spec"),
        py::arg("v") = nms::kDefaultValid);
  m.def("rescore_jacobians", &nms::rescore_jacobians, py::arg("set"), py::arg("grouping"),
        py::arg("spec"), py::arg("v") = nms::kDefaultValid);
  m.def("select_valid", &nms::select_valid, py::arg("r"), py::arg("perm"), py::arg("v"));
}

void bind_target_loss(py::module_& m) {
  py::class_<target_loss::Assignment>(m, "Assignment")
      .def_readonly("labels", &target_loss::Assignment::labels)
      .def_readonly("quality", &target_loss::Assignment::quality)
      .def_readonly("matched_gt", &target_loss::Assignment::matched_gt);

  m.def("quality", &target_loss::quality, py::arg("box"), py::arg("gt"));
  m.def("assign_targets", &target_loss::assign_targets, py::arg("boxes"), py::arg("gts"),
        py::arg("beta") = 0.3);
  m.def("average_precision", &target_loss::average_precision, py::arg("rescores"),
        py::arg("labels"));
  m.def("imagewise_ap", &target_loss::imagewise_ap, py::arg("rescores_per_image"),
        py::arg("labels_per_image"));
}

void bind_loss_analysis(py::module_& m) {
  using namespace loss_analysis;
  py::enum_<LossKind>(m, "LossKind")
      .value("l1", LossKind::l1)
      .value("l2", LossKind::l2)
      .value("dice", LossKind::dice);

  py::class_<NoiseLossSpec>(m, "NoiseLossSpec")
      .def(py::init([](LossKind kind, double sigma, double ell) {
             NoiseLossSpec spec{kind, sigma, ell};
             spec.validate();
             return spec;
           }),
           py::arg("kind"), py::arg("sigma"), py::arg("ell") = 4.0)
      .def_readwrite("kind", &NoiseLossSpec::kind)
      .def_readwrite("sigma", &NoiseLossSpec::sigma)
      .def_readwrite("ell", &NoiseLossSpec::ell);

  py::class_<McVariance>(m, "McVariance")
      .def_readonly("variance", &McVariance::variance)
      .def_readonly("std_error", &McVariance::std_error);

  py::enum_<StepScheduleKind>(m, "StepScheduleKind")
      .value("harmonic", StepScheduleKind::harmonic)
      .value("inverse_square", StepScheduleKind::inverse_square)
      .value("inverse_sqrt", StepScheduleKind::inverse_sqrt)
      .value("constant", StepScheduleKind::constant);

  py::class_<SgdSimConfig>(m, "SgdSimConfig")
      .def(py::init<>())
      .def_readwrite("dim", &SgdSimConfig::dim)
      .def_readwrite("steps", &SgdSimConfig::steps)
      .def_readwrite("schedule", &SgdSimConfig::schedule)
      .def_readwrite("step_scale", &SgdSimConfig::step_scale)
      .def_readwrite("trials", &SgdSimConfig::trials)
      .def_readwrite("seed", &SgdSimConfig::seed)
      .def_readwrite("weight_init_sigma", &SgdSimConfig::weight_init_sigma)
      .def("square_summable", &SgdSimConfig::square_summable)
      .def("sum_sq_steps", &SgdSimConfig::sum_sq_steps)
      .def("c1", &SgdSimConfig::c1)
      .def("c2", &SgdSimConfig::c2);

  py::class_<SgdSimResult>(m, "SgdSimResult")
      .def_readonly("mean_sq_deviation", &SgdSimResult::mean_sq_deviation)
      .def_readonly("std_error", &SgdSimResult::std_error)
      .def_readonly("per_trial", &SgdSimResult::per_trial);

  m.def("loss_value", &loss_value, py::arg("spec"), py::arg("eta"));
  m.def("loss_grad_wrt_noise", &loss_grad_wrt_noise, py::arg("spec"), py::arg("eta"));
  m.def("var_closed_form", &var_closed_form, py::arg("spec"));
  m.def("var_monte_carlo", &var_monte_carlo, py::arg("spec"), py::arg("samples"),
        py::arg("seed") = 0);
  m.def("inverse_erf", &inverse_erf, py::arg("y"));
  m.def("critical_sigma", &critical_sigma, py::arg("ell"));
  m.def("sgd_convergence_sim", &sgd_convergence_sim, py::arg("spec"), py::arg("config"));
}

void bind_depth(py::module_& m) {
  using namespace depth_geometry;

  py::class_<Vec3>(m, "Vec3")
      .def(py::init([](double x, double y, double z) { return Vec3{x, y, z}; }), py::arg("x"),
           py::arg("y"), py::arg("z"))
      .def_readwrite("x", &Vec3::x)
      .def_readwrite("y", &Vec3::y)
      .def_readwrite("z", &Vec3::z);

  py::class_<Mat3>(m, "Mat3")
      .def_static("identity", &Mat3::identity)
      .def_static("rotation_x", &Mat3::rotation_x, py::arg("angle"))
      .def_static("rotation_y", &Mat3::rotation_y, py::arg("angle"))
      .def("is_orthonormal", &Mat3::is_orthonormal, py::arg("tol") = 1e-9);

  py::class_<CameraModel>(m, "CameraModel")
      .def(py::init<>())
      .def_readwrite("f", &CameraModel::f)
      .def_readwrite("cu", &CameraModel::cu)
      .def_readwrite("cv", &CameraModel::cv)
      .def_readwrite("rotation", &CameraModel::rotation)
      .def_readwrite("translation", &CameraModel::translation)
      .def_readwrite("height", &CameraModel::height)
      .def_readwrite("pitch", &CameraModel::pitch)
      .def_readwrite("image_h", &CameraModel::image_h)
      .def("validate", &CameraModel::validate);

  py::class_<Projection>(m, "Projection")
      .def_readonly("u", &Projection::u)
      .def_readonly("v", &Projection::v)
      .def_readonly("z", &Projection::z);

  py::class_<DetectionGeom>(m, "DetectionGeom")
      .def(py::init<>())
      .def_readwrite("uc", &DetectionGeom::uc)
      .def_readwrite("vc", &DetectionGeom::vc)
      .def_readwrite("uc2d", &DetectionGeom::uc2d)
      .def_readwrite("vc2d", &DetectionGeom::vc2d)
      .def_readwrite("h2d", &DetectionGeom::h2d)
      .def_readwrite("alpha", &DetectionGeom::alpha)
      .def_readwrite("z_reg", &DetectionGeom::z_reg);

  py::class_<Pixel>(m, "Pixel").def_readonly("u", &Pixel::u).def_readonly("v", &Pixel::v);

  py::enum_<TrendKind>(m, "TrendKind")
      .value("ground", TrendKind::ground)
      .value("regressed", TrendKind::regressed);

  py::class_<TrendQuery>(m, "TrendQuery")
      .def(py::init([](double dh, double vb, double beta, double z) {
             return TrendQuery{dh, vb, beta, z};
           }),
           py::arg("dh"), py::arg("vb") = 0.0, py::arg("beta") = 0.0, py::arg("z") = 0.0)
      .def_readwrite("dh", &TrendQuery::dh)
      .def_readwrite("vb", &TrendQuery::vb)
      .def_readwrite("beta", &TrendQuery::beta)
      .def_readwrite("z", &TrendQuery::z);

  py::class_<TrendSimConfig>(m, "TrendSimConfig")
      .def(py::init<>())
      .def_readwrite("height_deltas", &TrendSimConfig::height_deltas)
      .def_readwrite("object_depths", &TrendSimConfig::object_depths)
      .def_readwrite("beta", &TrendSimConfig::beta)
      .def_readwrite("noise_sigma", &TrendSimConfig::noise_sigma)
      .def_readwrite("trials", &TrendSimConfig::trials)
      .def_readwrite("seed", &TrendSimConfig::seed);

  py::class_<TrendRow>(m, "TrendRow")
      .def_readonly("dh", &TrendRow::dh)
      .def_readonly("mean_err_ground", &TrendRow::mean_err_ground)
      .def_readonly("mean_err_regressed", &TrendRow::mean_err_regressed)
      .def_readonly("mean_err_merged", &TrendRow::mean_err_merged)
      .def_readonly("se_ground", &TrendRow::se_ground)
      .def_readonly("se_regressed", &TrendRow::se_regressed)
      .def_readonly("se_merged", &TrendRow::se_merged);

  m.def("project", &project, py::arg("cam"), py::arg("point"));
  m.def("ground_depth", &ground_depth, py::arg("cam"), py::arg("u"), py::arg("v"));
  m.def("ray_plane_depth_oracle", &ray_plane_depth_oracle, py::arg("cam"), py::arg("u"),
        py::arg("v"));
  m.def("bottom_center", &bottom_center, py::arg("det"));
  m.def("merge_depth", &merge_depth, py::arg("z_reg"), py::arg("z_ground"));
  m.def("predicted_trend", &predicted_trend, py::arg("kind"), py::arg("cam"), py::arg("query"));
  m.def("default_beta", &default_beta, py::arg("cam"), py::arg("z_max") = 60.0,
        py::arg("z_min") = 0.0);
  m.def("trend_sim", &trend_sim, py::arg("cam"), py::arg("config"));
  m.def("normalized_focal", &normalized_focal, py::arg("f"), py::arg("image_h"));
  m.def("focal_scale", &focal_scale, py::arg("f_src"), py::arg("h_src"), py::arg("f_dst"),
        py::arg("h_dst"));
}

void bind_equivariance(py::module_& m) {
  using namespace equivariance;

  py::class_<Image2D>(m, "Image2D")
      .def(py::init<std::size_t, std::size_t, double>(), py::arg("height"), py::arg("width"),
           py::arg("fill") = 0.0)
      .def_readonly("height", &Image2D::height)
      .def_readonly("width", &Image2D::width)
      .def_readwrite("data", &Image2D::data)
      .def("at", [](const Image2D& img, std::size_t r, std::size_t c) { return img.at(r, c); })
      .def("set",
           [](Image2D& img, std::size_t r, std::size_t c, double v) { img.at(r, c) = v; })
      .def("l2_norm", &Image2D::l2_norm);

  py::class_<ScaleFilterBank>(m, "ScaleFilterBank")
      .def_static("make", &ScaleFilterBank::make, py::arg("scales"), py::arg("size"),
                  py::arg("max_order"), py::arg("weights"))
      .def_static("member_count", &ScaleFilterBank::member_count, py::arg("max_order"))
      .def_readonly("scales", &ScaleFilterBank::scales)
      .def_readonly("weights", &ScaleFilterBank::weights)
      .def("filter_at", &ScaleFilterBank::filter_at, py::arg("scale_idx"));

  py::class_<EquivarianceError>(m, "EquivarianceError")
      .def_readonly("delta", &EquivarianceError::delta)
      .def_readonly("per_scale", &EquivarianceError::per_scale)
      .def_readonly("skipped", &EquivarianceError::skipped);

  py::class_<LogPolarSpec>(m, "LogPolarSpec")
      .def(py::init([](double cu, double cv, double r_min, double r_max) {
             return LogPolarSpec{cu, cv, r_min, r_max};
           }),
           py::arg("cu"), py::arg("cv"), py::arg("r_min") = 1.0, py::arg("r_max") = 0.0)
      .def_readwrite("cu", &LogPolarSpec::cu)
      .def_readwrite("cv", &LogPolarSpec::cv)
      .def_readwrite("r_min", &LogPolarSpec::r_min)
      .def_readwrite("r_max", &LogPolarSpec::r_max);

  m.def("hermite", &hermite, py::arg("n"), py::arg("x"));
  m.def("steerable_basis", &steerable_basis, py::arg("sigma"), py::arg("n"), py::arg("m"),
        py::arg("size"));
  m.def("steerable_basis_raw", &steerable_basis_raw, py::arg("sigma"), py::arg("n"),
        py::arg("m"), py::arg("size"));
  m.def("convolve", &convolve, py::arg("image"), py::arg("filter"));
  m.def("ses_convolve", &ses_convolve, py::arg("image"), py::arg("bank"));
  m.def("scale_project", &scale_project, py::arg("stack"));
  m.def("rescale", &rescale, py::arg("image"), py::arg("s"));
  m.def("equivariance_error", &equivariance_error, py::arg("net"), py::arg("images"),
        py::arg("scales"));
  m.def("ses_equivariance_error", &ses_equivariance_error, py::arg("bank"), py::arg("images"),
        py::arg("scales"));
  m.def("log_polar", &log_polar, py::arg("image"), py::arg("spec"), py::arg("out_h") = 0,
        py::arg("out_w") = 0);
  m.def("log_polar_inverse", &log_polar_inverse, py::arg("lp"), py::arg("spec"),
        py::arg("out_h"), py::arg("out_w"));
  m.def("ssim", &ssim, py::arg("a"), py::arg("b"), py::arg("dynamic_range") = 1.0);
}

void bind_io(py::module_& m) {
  m.def("read_boxes_json", &box_io::read_boxes_json, py::arg("path"));
  m.def("parse_boxes_json", &box_io::parse_boxes_json, py::arg("text"));
  m.def("boxes_to_json", &box_io::boxes_to_json, py::arg("boxes"));
  m.def("write_boxes_json", &box_io::write_boxes_json, py::arg("path"), py::arg("boxes"));
}

}  // namespace

PYBIND11_MODULE(_mono3d, m) {
  m.doc() = "Numerical core for monocular 3D detection: grouped differentiable NMS, "
            "3D box geometry, loss-convergence analysis, ground-plane depth and "
            "scale-equivariant steerable convolution";
  bind_geometry(m);
  bind_nms(m);
  bind_target_loss(m);
  bind_loss_analysis(m);
  bind_depth(m);
  bind_equivariance(m);
  bind_io(m);
}
