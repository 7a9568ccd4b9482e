#include "forge/io/payload.hpp"

#include "forge/core/error.hpp"

namespace forge::io {
namespace {

Json vec_json(const Vec3& v) { return Json::array({v.x, v.y, v.z}); }

Vec3 vec_from(const JsonReader& r) {
  if (r.array_size() != 3) r.fail("expected 3 numbers");
  return {r.at(0).number(), r.at(1).number(), r.at(2).number()};
}

const char* scaling_name(ParamScaling s) {
  switch (s) {
    case ParamScaling::kNone: return "none";
    case ParamScaling::kX: return "x";
    case ParamScaling::kY: return "y";
    case ParamScaling::kZ: return "z";
    case ParamScaling::kRadialXZ: return "radial_xz";
    case ParamScaling::kUniform: return "uniform";
  }
  return "none";
}

}  // namespace

Json pose_to_json(const RigidTransform& pose) {
  const Quaternion& q = pose.rotation;
  return Json{{"quaternion", Json::array({q.w, q.x, q.y, q.z})}, {"translation", vec_json(pose.translation)}};
}

RigidTransform pose_from_json(const JsonReader& r) {
  r.expect_object({"quaternion", "translation"});
  const JsonReader q = r.at("quaternion");
  if (q.array_size() != 4) q.fail("expected 4 numbers [w, x, y, z]");
  RigidTransform t;
  t.rotation = {q.at(0).number(), q.at(1).number(), q.at(2).number(), q.at(3).number()};
  t.translation = vec_from(r.at("translation"));
  return t;
}

Json instance_to_json(const TemplateRegistry& registry, const ConceptInstance& inst) {
  const auto& specs = registry.param_specs(inst.template_id);
  const auto& dspecs = registry.discrete_specs(inst.template_id);
  if (specs.size() != inst.continuous.size() || dspecs.size() != inst.discrete.size()) {
    throw Error(ErrorKind::kInvalidArgument, "parameter count mismatch for '" + inst.template_id + "'");
  }
  Json cont = Json::object(), disc = Json::object();
  for (std::size_t i = 0; i < specs.size(); ++i) cont[specs[i].name] = inst.continuous[i];
  for (std::size_t i = 0; i < dspecs.size(); ++i) disc[dspecs[i].name] = inst.discrete[i];
  return Json{{"template_id", inst.template_id},
              {"continuous_params", std::move(cont)},
              {"discrete_params", std::move(disc)},
              {"pose", pose_to_json(inst.pose)}};
}

ConceptInstance instance_from_json(const TemplateRegistry& registry, const JsonReader& r, bool partial) {
  if (partial) {
    r.expect_object({"template_id"}, {"continuous_params", "discrete_params", "pose"});
  } else {
    r.expect_object({"template_id", "continuous_params", "discrete_params", "pose"});
  }
  ConceptInstance inst;
  const JsonReader tid = r.at("template_id");
  inst.template_id = tid.string();
  if (!registry.contains(inst.template_id)) {
    throw Error(ErrorKind::kNotFound, tid.path() + ": unknown template id '" + inst.template_id + "'");
  }
  const auto& specs = registry.param_specs(inst.template_id);
  const auto& dspecs = registry.discrete_specs(inst.template_id);
  inst.continuous = registry.default_params(inst.template_id);
  inst.discrete = registry.default_discrete(inst.template_id);

  auto read_named = [&](const char* key, const auto& spec_list, auto&& assign) {
    if (!r.has(key)) return;
    const JsonReader obj = r.at(key);
    if (!obj.json().is_object()) obj.fail("expected object of named values");
    for (const auto& [name, _] : obj.json().items()) {
      bool found = false;
      for (std::size_t i = 0; i < spec_list.size(); ++i) {
        if (spec_list[i].name == name) {
          assign(i, obj.at(name));
          found = true;
        }
      }
      if (!found) obj.fail("unknown parameter '" + name + "' for template '" + inst.template_id + "'");
    }
    if (!partial) {
      for (const auto& s : spec_list) {
        if (!obj.has(s.name)) obj.fail("missing parameter '" + s.name + "'");
      }
    }
  };
  read_named("continuous_params", specs, [&](std::size_t i, const JsonReader& v) { inst.continuous[i] = v.number(); });
  read_named("discrete_params", dspecs, [&](std::size_t i, const JsonReader& v) {
    const long long k = v.integer();
    if (k < -1000000 || k > 1000000) v.fail("integer out of range");
    inst.discrete[i] = static_cast<int>(k);
  });
  if (r.has("pose")) inst.pose = pose_from_json(r.at("pose"));
  return inst;
}

Json mesh_to_json(const TriMesh& mesh) {
  Json v = Json::array(), f = Json::array();
  for (const Vec3& p : mesh.vertices) {
    v.push_back(p.x);
    v.push_back(p.y);
    v.push_back(p.z);
  }
  for (const Face& t : mesh.faces) {
    f.push_back(t[0]);
    f.push_back(t[1]);
    f.push_back(t[2]);
  }
  return Json{{"vertex_count", mesh.vertices.size()},
              {"face_count", mesh.faces.size()},
              {"vertices", std::move(v)},
              {"faces", std::move(f)}};
}

Json fit_result_to_json(const TemplateRegistry& registry, const FitResult& r) {
  Json cells = Json::array();
  for (const auto& c : r.cell_losses) cells.push_back(Json{{"discrete", c.discrete}, {"loss", c.loss}});
  return Json{{"cell_losses", std::move(cells)},
              {"instance", instance_to_json(registry, r.best)},
              {"final_loss", r.final_loss},
              {"initial_loss", r.initial_loss},
              {"loss_trace", r.loss_trace},
              {"iterations_used", r.iterations_used},
              {"converged", r.converged},
              {"violations", r.violations}};
}

Json pose_annotation_to_json(const PoseAnnotation& p) {
  return Json{{"knowledge", p.knowledge},
              {"label", p.label},
              {"part", p.part},
              {"member", p.member},
              {"pose", pose_to_json(p.world)},
              {"half_extents", p.half_extents ? vec_json(*p.half_extents) : Json(nullptr)}};
}

Json annotation_to_json(const AnnotationSet& a) {
  Json poses = Json::array();
  for (const auto& p : a.poses) poses.push_back(pose_annotation_to_json(p));
  return Json{{"conceptualization_id", a.conceptualization_id},
              {"knowledge_ids", a.knowledge_ids},
              {"point_labels", a.point_labels},
              {"poses", std::move(poses)}};
}

std::string region_table(const AnnotationSet& a) {
  std::string out = "index\tlabels\n";
  for (std::size_t i = 0; i < a.point_labels.size(); ++i) {
    out += std::to_string(i) + "\t";
    const auto& labels = a.point_labels[i];
    if (labels.empty()) out += "-";
    for (std::size_t k = 0; k < labels.size(); ++k) out += (k ? "," : "") + labels[k];
    out += "\n";
  }
  return out;
}

Json template_descriptor(const TemplateRegistry& templates, const KnowledgeRegistry& knowledge,
                         const std::string& id) {
  Json params = Json::array(), discrete = Json::array(), members = Json::array();
  for (const auto& s : templates.param_specs(id)) {
    params.push_back(Json{{"name", s.name},
                          {"lower", s.lower},
                          {"upper", s.upper},
                          {"default", s.default_value},
                          {"unit", s.unit},
                          {"scaling", scaling_name(s.scaling)}});
  }
  for (const auto& s : templates.discrete_specs(id)) {
    discrete.push_back(Json{{"name", s.name}, {"min", s.min}, {"max", s.max}, {"default", s.default_value}});
  }
  const bool geometry = templates.is_geometry(id);
  std::vector<std::string> tags;
  if (geometry) {
    tags = templates.geometry(id).tags;
  } else {
    const auto& def = templates.concept_def(id);
    tags = def.tags;
    for (const auto& m : def.members) {
      members.push_back(Json{{"name", m.name}, {"template_id", m.template_id}, {"repeat_by", m.repeat_by}});
    }
  }
  auto labels = [](const std::vector<std::pair<std::string, std::string>>& pairs) {
    Json out = Json::array();
    for (const auto& [k, l] : pairs) out.push_back(Json{{"knowledge", k}, {"label", l}});
    return out;
  };
  return Json{{"id", id},
              {"kind", geometry ? "geometry" : "concept"},
              {"tags", tags},
              {"params", std::move(params)},
              {"discrete_params", std::move(discrete)},
              {"members", std::move(members)},
              {"regions", labels(knowledge.region_labels(id))},
              {"frames", labels(knowledge.frame_labels(id))}};
}

Json template_catalog(const TemplateRegistry& templates, const KnowledgeRegistry& knowledge) {
  Json out = Json::array();
  for (const auto& id : templates.ids()) out.push_back(template_descriptor(templates, knowledge, id));
  return out;
}

}  // namespace forge::io
