#include "forge/fitting/fit.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <thread>

#include "forge/core/error.hpp"
#include "forge/core/loss.hpp"
#include "forge/core/sampling.hpp"

namespace forge {

void FitConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& rule) {
    throw Error(ErrorKind::kInvalidArgument, "fit config: " + field + " " + rule);
  };
  if (max_iters < 0) fail("max_iters", "must be >= 0");
  if (!(step_size > 0) || !std::isfinite(step_size)) fail("step_size", "must be positive");
  if (!(convergence_tol > 0 && convergence_tol < 1)) fail("convergence_tol", "must lie in (0, 1)");
  if (mesh_samples == 0) fail("mesh_samples", "must be positive");
  if (resolution < 3) fail("resolution", "must be >= 3");
  if (multi_start < 1) fail("multi_start", "must be >= 1");
}

namespace {

double length_scale(const PointCloud& target) {
  const Aabb box = bounding_box(target.points);
  const double d = norm(box.extent());
  return d > 0 ? d : 1.0;
}

struct Evaluation {
  double loss = 0.0;
  std::vector<double> gradient;  // continuous params then translation, rotation vector
  std::vector<std::string> violations;
};

Evaluation evaluate(const TemplateRegistry& registry, const ConceptInstance& inst, const Point2MeshObjective& objective,
                    int resolution, bool with_gradient) {
  Evaluation ev;
  ExpandOptions opt;
  opt.resolution = resolution;
  opt.strict = false;
  opt.with_jacobian = with_gradient;
  ParamJacobian jac;
  Expansion e = expand(registry, inst, opt, with_gradient ? &jac : nullptr);
  ev.violations = std::move(e.violations);
  std::vector<Vec3> vg;
  try {
    ev.loss = objective.evaluate(e.merged, with_gradient ? &vg : nullptr).value;
  } catch (const Error& err) {
    // e.g. a surface that collapsed to zero area
    if (err.kind() != ErrorKind::kInvalidArgument) throw;
    throw Error(ErrorKind::kNumeric, "degenerate geometry for '" + inst.template_id + "': " + err.what());
  }
  if (!with_gradient) return ev;
  const std::size_t K = jac.param_count;
  ev.gradient.assign(K, 0.0);
  for (std::size_t v = 0; v < vg.size(); ++v) {
    for (int a = 0; a < 3; ++a) {
      const double g = vg[v][a];
      if (g == 0.0) continue;
      const double* row = &jac.data[(v * 3 + static_cast<std::size_t>(a)) * K];
      for (std::size_t k = 0; k < K; ++k) ev.gradient[k] += g * row[k];
    }
  }
  return ev;
}

}  // namespace

FitResult fit_continuous(const TemplateRegistry& registry, const ConceptInstance& init, const PointCloud& target,
                         const FitConfig& config, const FitProgress& progress) {
  config.validate();
  validate_instance(registry, init);
  if (target.empty()) throw Error(ErrorKind::kInvalidArgument, "fit target cloud is empty");

  for (const Vec3& p : target.points) {
    if (!is_finite(p)) {
      throw Error(ErrorKind::kNumeric,
                  "non-finite loss for the initial instance of '" + init.template_id + "': target has non-finite points");
    }
  }
  const Point2MeshObjective objective(target, config.mesh_samples, config.seed);
  const auto& specs = registry.param_specs(init.template_id);
  const std::size_t n = specs.size();
  const std::size_t K = n + 6;
  const double scale = length_scale(target);

  // Per-coordinate size of one normalized unit.
  std::vector<double> unit(K);
  for (std::size_t i = 0; i < n; ++i) unit[i] = specs[i].span();
  for (std::size_t i = n; i < n + 3; ++i) unit[i] = scale;
  for (std::size_t i = n + 3; i < K; ++i) unit[i] = 1.0;

  FitResult result;
  ConceptInstance current = init;
  Evaluation ev = evaluate(registry, current, objective, config.resolution, config.max_iters > 0);
  if (!std::isfinite(ev.loss)) {
    throw Error(ErrorKind::kNumeric, "non-finite loss for the initial instance of '" + init.template_id + "'");
  }
  result.best = current;
  result.initial_loss = result.final_loss = ev.loss;
  result.loss_trace.push_back(ev.loss);
  result.violations = ev.violations;

  // Adam moments in normalized units.
  std::vector<double> m(K, 0.0), v(K, 0.0);
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-12;
  double b1 = 1.0, b2 = 1.0;

  for (int it = 0; it < config.max_iters; ++it) {
    const double lr =
        config.step_size * 0.5 * (1.0 + std::cos(std::numbers::pi * it / static_cast<double>(config.max_iters)));
    b1 *= kBeta1;
    b2 *= kBeta2;
    std::vector<double> step(K);
    for (std::size_t k = 0; k < K; ++k) {
      const double g = ev.gradient[k] * unit[k];
      m[k] = kBeta1 * m[k] + (1 - kBeta1) * g;
      v[k] = kBeta2 * v[k] + (1 - kBeta2) * g * g;
      const double mh = m[k] / (1 - b1), vh = v[k] / (1 - b2);
      step[k] = -lr * mh / (std::sqrt(vh) + kEps) * unit[k];
    }
    for (std::size_t i = 0; i < n; ++i) {
      current.continuous[i] = std::clamp(current.continuous[i] + step[i], specs[i].lower, specs[i].upper);
    }
    current.pose = perturb_pose(current.pose, {step[n], step[n + 1], step[n + 2]},
                                {step[n + 3], step[n + 4], step[n + 5]});

    ev = evaluate(registry, current, objective, config.resolution, true);
    if (!std::isfinite(ev.loss)) throw Error(ErrorKind::kNumeric, "loss became non-finite during fitting");
    result.loss_trace.push_back(ev.loss);
    result.iterations_used = it + 1;
    if (ev.loss < result.final_loss) {
      result.final_loss = ev.loss;
      result.best = current;
      result.violations = ev.violations;
    }
    if (progress && !progress(result.loss_trace)) break;

    // relative improvement of the best loss over the last window
    if (result.loss_trace.size() > static_cast<std::size_t>(FitConfig::kWindow)) {
      const auto end = result.loss_trace.end();
      const double before = *std::min_element(result.loss_trace.begin(), end - FitConfig::kWindow);
      const double gain = before - result.final_loss;
      if (gain <= config.convergence_tol * std::max(before, 1e-300)) {
        result.converged = true;
        break;
      }
    }
  }
  return result;
}

ConceptInstance default_init(const TemplateRegistry& registry, const std::string& template_id,
                             const PointCloud& target) {
  if (target.empty()) throw Error(ErrorKind::kInvalidArgument, "fit target cloud is empty");
  ConceptInstance inst = default_instance(registry, template_id);
  inst.pose.translation = centroid(target.points);

  const Vec3 want = bounding_box(target.points).extent();
  const Vec3 have = bounding_box(instantiate_concept(registry, inst, 12).merged.vertices).extent();
  auto ratio = [&](int a) { return have[a] > 0 && want[a] > 0 ? want[a] / have[a] : 1.0; };
  const double rx = ratio(0), ry = ratio(1), rz = ratio(2);
  const double uniform = std::cbrt(rx * ry * rz);

  const auto& specs = registry.param_specs(template_id);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const ParamSpec& s = specs[i];
    double r = 1.0;
    switch (s.scaling) {
      case ParamScaling::kX: r = rx; break;
      case ParamScaling::kY: r = ry; break;
      case ParamScaling::kZ: r = rz; break;
      case ParamScaling::kRadialXZ: r = 0.5 * (rx + rz); break;
      case ParamScaling::kUniform: r = uniform; break;
      case ParamScaling::kNone: r = s.unit == "m" ? uniform : 1.0; break;
    }
    inst.continuous[i] = std::clamp(s.default_value * r, s.lower, s.upper);
  }
  return inst;
}

namespace {

std::vector<std::vector<int>> discrete_grid(const std::vector<DiscreteParamSpec>& specs) {
  std::vector<std::vector<int>> grid{{}};
  for (const auto& s : specs) {
    std::vector<std::vector<int>> next;
    for (const auto& prefix : grid) {
      for (int v = s.min; v <= s.max; ++v) {
        next.push_back(prefix);
        next.back().push_back(v);
      }
    }
    grid = std::move(next);
  }
  return grid;
}

ConceptInstance jitter(const TemplateRegistry& registry, ConceptInstance inst, std::uint64_t seed) {
  UniformRng rng(seed);
  const auto& specs = registry.param_specs(inst.template_id);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    inst.continuous[i] = std::clamp(inst.continuous[i] * (1.0 + rng.uniform(-0.1, 0.1)), specs[i].lower, specs[i].upper);
  }
  return inst;
}

FitResult fit_cell(const TemplateRegistry& registry, const ConceptInstance& base, const PointCloud& target,
                   const FitConfig& config) {
  FitResult best;
  for (int s = 0; s < config.multi_start; ++s) {
    const ConceptInstance init = s == 0 ? base : jitter(registry, base, config.seed * 7919 + static_cast<std::uint64_t>(s));
    FitResult r = fit_continuous(registry, init, target, config);
    if (s == 0 || r.final_loss < best.final_loss) best = std::move(r);
  }
  return best;
}

}  // namespace

FitResult fit_with_discrete(const TemplateRegistry& registry, const std::string& template_id,
                            const PointCloud& target, const FitConfig& config) {
  config.validate();
  const auto& dspecs = registry.discrete_specs(template_id);
  const auto grid = discrete_grid(dspecs);
  if (grid.empty()) throw Error(ErrorKind::kInvalidArgument, "empty discrete grid for '" + template_id + "'");
  const ConceptInstance base = default_init(registry, template_id, target);

  std::vector<std::future<FitResult>> jobs;
  const bool parallel = std::thread::hardware_concurrency() > 1 && grid.size() > 1;
  for (const auto& cell : grid) {
    ConceptInstance init = base;
    init.discrete = cell;
    jobs.push_back(std::async(parallel ? std::launch::async : std::launch::deferred,
                              [&registry, &target, &config, init] { return fit_cell(registry, init, target, config); }));
  }
  // grid order is lexicographic, so a strict comparison keeps the smallest on ties
  FitResult best;
  std::vector<CellLoss> cells;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    FitResult r = jobs[i].get();
    cells.push_back({grid[i], r.final_loss});
    if (i == 0 || r.final_loss < best.final_loss) best = std::move(r);
  }
  best.cell_losses = std::move(cells);
  return best;
}

}  // namespace forge
