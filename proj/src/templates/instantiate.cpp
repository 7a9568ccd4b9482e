#include <algorithm>
#include <cmath>
#include <sstream>

#include "forge/core/error.hpp"
#include "forge/templates/instance.hpp"

namespace forge {
namespace {

std::string join_path(const std::string& parent, const std::string& name) {
  return parent.empty() ? name : parent + "/" + name;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(9);
  os << v;
  return os.str();
}

RigidTransform to_rigid(const Frame& f) {
  Mat3 r;
  for (int i = 0; i < 9; ++i) r.m[i] = f.rotation.m[i].a;
  return RigidTransform::from_matrix(r, {f.translation.x.a, f.translation.y.a, f.translation.z.a});
}

std::vector<double> values(const std::vector<Scalar>& p) {
  std::vector<double> out;
  out.reserve(p.size());
  for (const auto& s : p) out.push_back(s.a);
  return out;
}

struct Expander {
  const TemplateRegistry& registry;
  const ExpandOptions& options;
  std::size_t columns;  // derivative columns in use
  Expansion out;
  std::vector<std::vector<double>> leaf_jacobians;  // per leaf, (v * 3 + axis) * columns + k

  // Clamps member parameters in place; records or throws on violation.
  void check_bounds(const std::string& path, const std::string& id, std::vector<Scalar>& params,
                    std::vector<int>& discrete) {
    const auto& specs = registry.param_specs(id);
    if (params.size() != specs.size()) {
      throw Error(ErrorKind::kInvalidArgument, "member '" + path + "' of type '" + id + "' expects " +
                                                   std::to_string(specs.size()) + " parameters, got " +
                                                   std::to_string(params.size()));
    }
    for (std::size_t i = 0; i < specs.size(); ++i) {
      const ParamSpec& s = specs[i];
      const double v = params[i].a;
      const double slack = 1e-12 * s.span();
      if (std::isfinite(v) && v >= s.lower - slack && v <= s.upper + slack) continue;
      std::string msg = "member '" + path + "' parameter '" + s.name + "' = " + fmt(v) + " outside [" +
                        fmt(s.lower) + ", " + fmt(s.upper) + "]";
      if (options.strict) throw Error(ErrorKind::kOutOfBounds, msg);
      out.violations.push_back(std::move(msg));
      params[i] = Scalar(std::isfinite(v) ? std::clamp(v, s.lower, s.upper) : s.default_value);
    }
    const auto& dspecs = registry.discrete_specs(id);
    if (discrete.empty()) discrete = registry.default_discrete(id);
    if (discrete.size() != dspecs.size()) {
      throw Error(ErrorKind::kInvalidArgument, "member '" + path + "' has wrong discrete parameter count");
    }
    for (std::size_t i = 0; i < dspecs.size(); ++i) {
      const auto& s = dspecs[i];
      if (discrete[i] >= s.min && discrete[i] <= s.max) continue;
      std::string msg = "member '" + path + "' discrete parameter '" + s.name + "' = " +
                        std::to_string(discrete[i]) + " outside [" + std::to_string(s.min) + ", " +
                        std::to_string(s.max) + "]";
      if (options.strict) throw Error(ErrorKind::kOutOfBounds, msg);
      out.violations.push_back(std::move(msg));
      discrete[i] = std::clamp(discrete[i], s.min, s.max);
    }
  }

  void node(const std::string& path, const std::string& id, const std::vector<Scalar>& params,
            const std::vector<int>& discrete, const Frame& world) {
    if (registry.is_geometry(id)) {
      leaf(path, id, params, world);
      return;
    }
    out.concepts.push_back({path, id, values(params), discrete, to_rigid(world)});
    const ConceptTemplateDef& def = registry.concept_def(id);
    std::vector<MemberInstance> members = def.constraint(params, discrete);
    for (MemberInstance& m : members) {
      const std::string child = join_path(path, m.name);
      if (!registry.contains(m.template_id)) {
        throw Error(ErrorKind::kNotFound, "member '" + child + "': unknown template '" + m.template_id + "'");
      }
      check_bounds(child, m.template_id, m.params, m.discrete);
      node(child, m.template_id, m.params, m.discrete, compose(world, m.local));
    }
  }

  void leaf(const std::string& path, const std::string& id, const std::vector<Scalar>& params,
            const Frame& world) {
    const GeometryTemplateDef& def = registry.geometry(id);
    const auto rest = registry.default_instance(id, options.resolution);
    const std::vector<double> p = values(params);
    const RigidTransform rigid = to_rigid(world);

    ExpandedLeaf lf;
    lf.path = path;
    lf.template_id = id;
    lf.params = p;
    lf.world = rigid;
    lf.mesh.faces = rest->faces;
    lf.mesh.vertices.resize(rest->vertices.size());
    lf.mesh.truncated = def.truncates && def.truncates(p);

    Mat3 r;
    for (int i = 0; i < 9; ++i) r.m[i] = world.rotation.m[i].a;
    const Vec3 t{world.translation.x.a, world.translation.y.a, world.translation.z.a};

    std::vector<double> jac;
    if (!options.with_jacobian) {
      for (std::size_t v = 0; v < rest->vertices.size(); ++v) {
        lf.mesh.vertices[v] = r * def.vertex_map(rest->vertices[v], p) + t;
      }
    } else {
      const std::size_t K = columns;
      const std::size_t m = params.size();
      jac.assign(rest->vertices.size() * 3 * K, 0.0);
      std::vector<GeoJet> gp(m);
      for (std::size_t i = 0; i < m; ++i) gp[i] = GeoJet(p[i], static_cast<int>(i));
      for (std::size_t v = 0; v < rest->vertices.size(); ++v) {
        const Vec3T<GeoJet> g = def.vertex_map_jet(rest->vertices[v], gp);
        const Vec3 local{g.x.a, g.y.a, g.z.a};
        lf.mesh.vertices[v] = r * local + t;
        // d local / d theta via the member parameters' own derivatives
        double dl[3][kMaxDerivatives] = {};
        for (int a = 0; a < 3; ++a) {
          const GeoJet& ga = g[a];
          for (std::size_t i = 0; i < m; ++i) {
            const double d = ga.v[i];
            if (d == 0.0) continue;
            const auto& pv = params[i].v;
            for (std::size_t k = 0; k < K; ++k) dl[a][k] += d * pv[k];
          }
        }
        double* row = &jac[v * 3 * K];
        for (int a = 0; a < 3; ++a) {
          const Scalar* ra = &world.rotation.m[3 * a];
          const Scalar& ta = world.translation[a];
          for (std::size_t k = 0; k < K; ++k) {
            row[a * K + k] = ra[0].a * dl[0][k] + ra[1].a * dl[1][k] + ra[2].a * dl[2][k] +
                             ra[0].v[k] * local.x + ra[1].v[k] * local.y + ra[2].v[k] * local.z + ta.v[k];
          }
        }
      }
    }

    lf.vertex_begin = static_cast<std::uint32_t>(out.merged.vertices.size());
    lf.face_begin = static_cast<std::uint32_t>(out.merged.faces.size());
    out.merged.append(lf.mesh);
    out.merged.truncated = out.merged.truncated || lf.mesh.truncated;
    lf.vertex_end = static_cast<std::uint32_t>(out.merged.vertices.size());
    lf.face_end = static_cast<std::uint32_t>(out.merged.faces.size());
    out.leaves.push_back(std::move(lf));
    leaf_jacobians.push_back(std::move(jac));
  }
};

}  // namespace

ConceptInstance default_instance(const TemplateRegistry& registry, std::string_view template_id) {
  ConceptInstance inst;
  inst.template_id = std::string(template_id);
  inst.continuous = registry.default_params(template_id);
  inst.discrete = registry.default_discrete(template_id);
  return inst;
}

void validate_instance(const TemplateRegistry& registry, const ConceptInstance& inst) {
  if (!registry.contains(inst.template_id)) {
    throw Error(ErrorKind::kNotFound, "unknown template '" + inst.template_id + "'");
  }
  const auto& specs = registry.param_specs(inst.template_id);
  const auto& dspecs = registry.discrete_specs(inst.template_id);
  if (inst.continuous.size() != specs.size()) {
    throw Error(ErrorKind::kInvalidArgument, "template '" + inst.template_id + "' expects " +
                                                 std::to_string(specs.size()) + " continuous parameters, got " +
                                                 std::to_string(inst.continuous.size()));
  }
  if (inst.discrete.size() != dspecs.size()) {
    throw Error(ErrorKind::kInvalidArgument, "template '" + inst.template_id + "' expects " +
                                                 std::to_string(dspecs.size()) + " discrete parameters, got " +
                                                 std::to_string(inst.discrete.size()));
  }
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const double v = inst.continuous[i];
    if (!std::isfinite(v) || !specs[i].contains(v)) {
      throw Error(ErrorKind::kOutOfBounds, "parameter '" + specs[i].name + "' = " + fmt(v) + " outside [" +
                                               fmt(specs[i].lower) + ", " + fmt(specs[i].upper) + "]");
    }
  }
  for (std::size_t i = 0; i < dspecs.size(); ++i) {
    const int v = inst.discrete[i];
    if (v < dspecs[i].min || v > dspecs[i].max) {
      throw Error(ErrorKind::kOutOfBounds, "discrete parameter '" + dspecs[i].name + "' = " + std::to_string(v) +
                                               " outside [" + std::to_string(dspecs[i].min) + ", " +
                                               std::to_string(dspecs[i].max) + "]");
    }
  }
  const Quaternion& q = inst.pose.rotation;
  if (!std::isfinite(q.norm()) || std::abs(q.norm() - 1.0) > 1e-6 || !is_finite(inst.pose.translation)) {
    throw Error(ErrorKind::kInvalidArgument, "pose must have a unit quaternion and finite translation");
  }
}

std::size_t Expansion::leaf_of_face(std::uint32_t face) const {
  auto it = std::upper_bound(leaves.begin(), leaves.end(), face,
                             [](std::uint32_t f, const ExpandedLeaf& l) { return f < l.face_end; });
  if (it == leaves.end()) throw Error(ErrorKind::kOutOfBounds, "face index " + std::to_string(face) + " out of range");
  return static_cast<std::size_t>(it - leaves.begin());
}

Expansion expand(const TemplateRegistry& registry, const ConceptInstance& inst, const ExpandOptions& options,
                 ParamJacobian* jacobian) {
  validate_instance(registry, inst);
  if (options.resolution < 3) throw Error(ErrorKind::kInvalidArgument, "resolution must be at least 3");

  const std::size_t n = inst.continuous.size();
  Expander ex{registry, options, n + 6, {}, {}};

  std::vector<Scalar> params(n);
  for (std::size_t i = 0; i < n; ++i) params[i] = Scalar(inst.continuous[i], static_cast<int>(i));

  // R = (I + [w]x) R0 with w = 0 seeded, t seeded.
  const Mat3 r0 = inst.pose.rotation_matrix();
  Frame root;
  for (int i = 0; i < 9; ++i) root.rotation.m[i] = Scalar(r0.m[i]);
  for (int k = 0; k < 3; ++k) {
    Vec3 e{0, 0, 0};
    e[k] = 1.0;
    const Mat3 d = skew(e) * r0;
    for (int i = 0; i < 9; ++i) root.rotation.m[i].v[n + 3 + k] = d.m[i];
    root.translation[k] = Scalar(inst.pose.translation[k], static_cast<int>(n + k));
  }

  const std::string root_path = registry.is_geometry(inst.template_id) ? inst.template_id : "";
  ex.node(root_path, inst.template_id, params, inst.discrete, root);

  if (jacobian && options.with_jacobian) {
    const std::size_t K = n + 6;
    jacobian->vertex_count = ex.out.merged.vertices.size();
    jacobian->param_count = K;
    jacobian->data.clear();
    jacobian->data.reserve(jacobian->vertex_count * 3 * K);
    for (const auto& j : ex.leaf_jacobians) jacobian->data.insert(jacobian->data.end(), j.begin(), j.end());
  }
  return std::move(ex.out);
}

TriMesh instantiate_geometry(const TemplateRegistry& registry, std::string_view id, std::span<const double> params,
                             int resolution) {
  ConceptInstance inst;
  inst.template_id = std::string(id);
  inst.continuous.assign(params.begin(), params.end());
  if (!registry.is_geometry(id)) throw Error(ErrorKind::kNotFound, "unknown geometry template '" + inst.template_id + "'");
  ExpandOptions opt;
  opt.resolution = resolution;
  return expand(registry, inst, opt).merged;
}

Expansion instantiate_concept(const TemplateRegistry& registry, const ConceptInstance& instance, int resolution) {
  ExpandOptions opt;
  opt.resolution = resolution;
  return expand(registry, instance, opt);
}

InstanceWithJacobian instantiate_with_jacobian(const TemplateRegistry& registry, const ConceptInstance& instance,
                                               int resolution, bool strict) {
  ExpandOptions opt;
  opt.resolution = resolution;
  opt.with_jacobian = true;
  opt.strict = strict;
  InstanceWithJacobian out;
  out.expansion = expand(registry, instance, opt, &out.jacobian);
  return out;
}

RigidTransform perturb_pose(const RigidTransform& pose, const Vec3& dt, const Vec3& w) {
  RigidTransform out;
  out.rotation = (Quaternion::exp(w) * pose.rotation).normalized();
  out.translation = pose.translation + dt;
  return out;
}

}  // namespace forge
