#pragma once

#include <string>

#include "forge/fitting/fit.hpp"
#include "forge/io/json.hpp"
#include "forge/knowledge/knowledge.hpp"

namespace forge::io {

/// {"quaternion": [w, x, y, z], "translation": [x, y, z]}
Json pose_to_json(const RigidTransform& pose);
RigidTransform pose_from_json(const JsonReader& reader);

/// {"template_id", "continuous_params": {name: value}, "discrete_params": {name: value}, "pose"}.
Json instance_to_json(const TemplateRegistry& registry, const ConceptInstance& instance);

/// Strict inverse of instance_to_json. With `partial`, missing parameters take
/// their defaults and a missing pose is the identity. Unknown template ids
/// throw Error(kNotFound); unknown parameter names throw Error(kSchema). Bounds
/// are not checked here.
ConceptInstance instance_from_json(const TemplateRegistry& registry, const JsonReader& reader, bool partial = false);

/// Flat arrays: {"vertices": [x0, y0, z0, ...], "faces": [a0, b0, c0, ...], counts}.
Json mesh_to_json(const TriMesh& mesh);

Json fit_result_to_json(const TemplateRegistry& registry, const FitResult& result);

/// Point labels as arrays plus pose records.
Json annotation_to_json(const AnnotationSet& annotations);
Json pose_annotation_to_json(const PoseAnnotation& pose);

/// "index\tlabels" lines, labels comma-joined, "-" for an unlabeled point.
std::string region_table(const AnnotationSet& annotations);

/// Schemas, members, tags and the knowledge labels defined on a template.
Json template_descriptor(const TemplateRegistry& templates, const KnowledgeRegistry& knowledge,
                         const std::string& template_id);
/// Descriptors of every template, sorted by id.
Json template_catalog(const TemplateRegistry& templates, const KnowledgeRegistry& knowledge);

}  // namespace forge::io
