#include "forge/service/service.hpp"

#include <httplib.h>

#include <atomic>
#include <condition_variable>
#include <future>
#include <map>
#include <mutex>
#include <optional>

#include "forge/core/error.hpp"
#include "forge/core/sampling.hpp"
#include "forge/fitting/fit.hpp"
#include "forge/io/document.hpp"
#include "forge/io/files.hpp"
#include "forge/io/mesh_io.hpp"
#include "forge/io/payload.hpp"

namespace forge::service {
namespace {

using io::Json;
using io::JsonReader;

const char* kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::kInvalidArgument: return "invalid_argument";
    case ErrorKind::kNotFound: return "not_found";
    case ErrorKind::kOutOfBounds: return "out_of_bounds";
    case ErrorKind::kSchema: return "schema";
    case ErrorKind::kConflict: return "conflict";
    case ErrorKind::kNumeric: return "numeric";
    case ErrorKind::kIo: return "io";
  }
  return "error";
}

int status_of(ErrorKind k) {
  switch (k) {
    case ErrorKind::kNotFound: return 404;
    case ErrorKind::kConflict: return 409;
    case ErrorKind::kIo: return 500;
    default: return 400;
  }
}

Response error_response(int status, ErrorKind kind, const std::string& message) {
  return {status, io::canonical_dump(Json{{"error", Json{{"kind", kind_name(kind)}, {"message", message}}}})};
}

Response json_response(const Json& j, int status = 200) { return {status, io::canonical_dump(j)}; }

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < path.size()) {
    const std::size_t next = path.find('/', pos);
    const std::size_t end = next == std::string::npos ? path.size() : next;
    if (end > pos) out.push_back(path.substr(pos, end - pos));
    pos = end + 1;
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, std::size_t from) {
  std::string out;
  for (std::size_t i = from; i < parts.size(); ++i) out += (i > from ? "/" : "") + parts[i];
  return out;
}

// Relative path without "..", resolved under `root`.
std::filesystem::path confined(const std::filesystem::path& root, const JsonReader& r) {
  if (root.empty()) r.fail("file access is disabled on this server");
  const std::filesystem::path rel(r.string());
  if (rel.empty() || rel.is_absolute()) r.fail("expected a relative path");
  for (const auto& c : rel) {
    if (c == "..") r.fail("path must not leave the configured directory");
  }
  return root / rel;
}

std::vector<Vec3> flat_points(const JsonReader& r) {
  const std::size_t n = r.array_size();
  if (n % 3 != 0) r.fail("expected a flat array of x, y, z triples");
  std::vector<Vec3> out(n / 3);
  for (std::size_t i = 0; i < n; ++i) out[i / 3][static_cast<int>(i % 3)] = r.at(i).number();
  return out;
}

TriMesh mesh_from_json(const JsonReader& r) {
  r.expect_object({"vertices", "faces"}, {"vertex_count", "face_count"});
  TriMesh m;
  m.vertices = flat_points(r.at("vertices"));
  const JsonReader f = r.at("faces");
  if (f.array_size() % 3 != 0) f.fail("expected a flat array of index triples");
  for (std::size_t i = 0; i < f.array_size(); i += 3) {
    Face face;
    for (std::size_t k = 0; k < 3; ++k) {
      const long long v = f.at(i + k).integer();
      if (v < 0 || v >= static_cast<long long>(m.vertices.size())) f.at(i + k).fail("vertex index out of range");
      face[k] = static_cast<std::uint32_t>(v);
    }
    m.faces.push_back(face);
  }
  m.validate();
  return m;
}

FitConfig fit_config_from_json(const JsonReader& r) {
  FitConfig c;
  r.expect_object({}, {"max_iters", "step_size", "convergence_tol", "mesh_samples", "resolution", "seed", "multi_start"});
  auto integer = [&](const char* key, auto& out) {
    if (!r.has(key)) return;
    const long long v = r.at(key).integer();
    if (v < 0) r.at(key).fail("must not be negative");
    out = static_cast<std::remove_reference_t<decltype(out)>>(v);
  };
  integer("max_iters", c.max_iters);
  integer("mesh_samples", c.mesh_samples);
  integer("resolution", c.resolution);
  integer("seed", c.seed);
  integer("multi_start", c.multi_start);
  if (r.has("step_size")) c.step_size = r.at("step_size").number();
  if (r.has("convergence_tol")) c.convergence_tol = r.at("convergence_tol").number();
  c.validate();
  return c;
}

int resolution_from(const JsonReader& r, const char* key) {
  if (!r.has(key)) return 24;
  const long long v = r.at(key).integer();
  if (v < 3 || v > 512) r.at(key).fail("resolution must lie in [3, 512]");
  return static_cast<int>(v);
}

ConceptPart* find_part(std::vector<ConceptPart>& parts, const std::vector<std::string>& path, std::size_t from) {
  for (auto& p : parts) {
    if (p.name == path[from]) return from + 1 == path.size() ? &p : find_part(p.children, path, from + 1);
  }
  return nullptr;
}

struct Session {
  std::string id;
  std::mutex mutex;
  std::condition_variable idle;
  Conceptualization doc;
  PointCloud cloud;
  std::map<std::string, std::vector<std::uint32_t>> targets;
  std::map<std::string, std::vector<double>> history;
  std::uint64_t revision = 0;
  bool dirty = false;
  std::string saved_path;

  std::string opt_state = "idle";  // idle, running, done, failed
  std::string opt_part;
  std::vector<double> opt_trace;
  Json opt_result;
  std::string opt_error;
  std::future<void> job;
  std::atomic<bool> cancel{false};
  std::atomic<std::uint64_t> last_used{0};

  bool running() const { return opt_state == "running"; }
};

}  // namespace

struct Service::Impl {
  TemplateRegistry templates;
  KnowledgeRegistry knowledge;
  ServiceConfig config;

  std::mutex store_mutex;
  std::map<std::string, std::shared_ptr<Session>> sessions;
  std::uint64_t next_id = 1;
  std::atomic<std::uint64_t> clock{0};

  Impl(TemplateRegistry t, KnowledgeRegistry k, ServiceConfig c)
      : templates(std::move(t)), knowledge(std::move(k)), config(std::move(c)) {}

  std::shared_ptr<Session> session(const std::string& id) {
    std::lock_guard lock(store_mutex);
    auto it = sessions.find(id);
    if (it == sessions.end()) throw Error(ErrorKind::kNotFound, "unknown session '" + id + "'");
    it->second->last_used = ++clock;
    return it->second;
  }

  // Requires the session lock.
  Json session_state(Session& s) const {
    Json targets = Json::object(), history = Json::object();
    for (const auto& [k, v] : s.targets) targets[k] = v.size();
    for (const auto& [k, v] : s.history) history[k] = v;
    return Json{{"session_id", s.id},
                {"object_id", s.doc.object_id},
                {"category", Json{{"code", s.doc.category.code}, {"name", s.doc.category.name}}},
                {"source_mesh", s.doc.source_mesh},
                {"point_count", s.cloud.size()},
                {"revision", s.revision},
                {"dirty", s.dirty},
                {"saved_path", s.saved_path},
                {"parts", io::parts_to_json(templates, s.doc.parts)},
                {"targets", std::move(targets)},
                {"fit_history", std::move(history)},
                {"optimize", Json{{"state", s.opt_state},
                                  {"part", s.opt_part},
                                  {"loss_trace", s.opt_trace},
                                  {"result", s.opt_result},
                                  {"error", s.opt_error}}}};
  }

  Response templates_list() { return json_response(io::template_catalog(templates, knowledge)); }

  Response instantiate(const Json& body) {
    const JsonReader r(body);
    r.expect_object({"template_id"}, {"continuous_params", "discrete_params", "pose", "resolution"});
    Json inst = body;
    inst.erase("resolution");
    const ConceptInstance instance = io::instance_from_json(templates, JsonReader(inst), true);
    const int res = resolution_from(r, "resolution");
    return json_response(io::mesh_to_json(instantiate_concept(templates, instance, res).merged));
  }

  Response create_session(const Json& body) {
    const JsonReader r(body);
    r.expect_object({}, {"object_id", "category", "source_mesh", "mesh", "points", "object_path", "sample_count",
                         "seed", "document", "document_path"});
    auto s = std::make_shared<Session>();

    if (r.has("document") && r.has("document_path")) r.fail("give at most one of 'document' and 'document_path'");
    if (r.has("document")) {
      s->doc = io::document_from_json(templates, r.at("document"));
    } else if (r.has("document_path")) {
      s->doc = io::load_document(templates, confined(config.session_dir, r.at("document_path")));
    } else {
      if (!r.has("object_id")) r.fail("missing field 'object_id'");
      s->doc.category = {"Unk", "Unknown"};
    }
    if (r.has("object_id")) s->doc.object_id = r.at("object_id").string();
    if (r.has("category")) {
      const JsonReader cat = r.at("category");
      cat.expect_object({"code", "name"});
      s->doc.category = {cat.at("code").string(), cat.at("name").string()};
      if (!io::is_category_code(s->doc.category.code)) cat.at("code").fail("expected a 3-character category code");
    }
    if (r.has("source_mesh")) s->doc.source_mesh = r.at("source_mesh").string();

    std::size_t sample_count = config.default_sample_count;
    if (r.has("sample_count")) {
      const long long n = r.at("sample_count").integer();
      if (n < 1 || n > 10'000'000) r.at("sample_count").fail("sample_count must lie in [1, 10000000]");
      sample_count = static_cast<std::size_t>(n);
    }
    const std::uint64_t seed = r.has("seed") ? static_cast<std::uint64_t>(r.at("seed").integer()) : 0;
    const int sources = int(r.has("mesh")) + int(r.has("points")) + int(r.has("object_path"));
    if (sources != 1) r.fail("give exactly one of 'mesh', 'points' and 'object_path'");
    if (r.has("points")) {
      s->cloud.points = flat_points(r.at("points"));
    } else {
      TriMesh mesh;
      if (r.has("mesh")) {
        mesh = mesh_from_json(r.at("mesh"));
      } else {
        const JsonReader p = r.at("object_path");
        mesh = io::load_mesh(confined(config.asset_dir, p));
        if (s->doc.source_mesh.empty()) s->doc.source_mesh = p.string();
      }
      if (mesh.faces.empty()) {
        s->cloud.points = mesh.vertices;
      } else {
        s->cloud = sample_surface(mesh, sample_count, seed);
        s->cloud.tags.clear();
      }
    }
    if (s->cloud.empty()) r.fail("the target has no points");

    std::lock_guard lock(store_mutex);
    if (sessions.size() >= config.max_sessions) evict_one();
    s->id = "s" + std::to_string(next_id++);
    s->last_used = ++clock;
    sessions[s->id] = s;
    std::lock_guard slock(s->mutex);
    return json_response(session_state(*s), 201);
  }

  // Requires store_mutex. Drops the least recently used session that has no
  // unsaved changes and no running job.
  void evict_one() {
    std::shared_ptr<Session> victim;
    for (auto& [id, s] : sessions) {
      std::unique_lock lock(s->mutex, std::try_to_lock);
      if (!lock.owns_lock() || s->dirty || s->running()) continue;
      if (!victim || s->last_used < victim->last_used) victim = s;
    }
    if (!victim) {
      throw Error(ErrorKind::kConflict, "session store is full (" + std::to_string(config.max_sessions) +
                                            ") and every session has unsaved changes");
    }
    sessions.erase(victim->id);
  }

  Response get_session(const std::string& id) {
    auto s = session(id);
    std::lock_guard lock(s->mutex);
    return json_response(session_state(*s));
  }

  Response get_part(const std::string& id, const std::vector<std::string>& path) {
    auto s = session(id);
    std::lock_guard lock(s->mutex);
    const std::string key = join(path, 0);
    ConceptPart* p = find_part(s->doc.parts, path, 0);
    if (!p) throw Error(ErrorKind::kNotFound, "unknown part '" + key + "'");
    const auto t = s->targets.find(key);
    const auto h = s->history.find(key);
    return json_response(Json{{"part", io::parts_to_json(templates, {*p})[0]},
                              {"target_point_count", t == s->targets.end() ? s->cloud.size() : t->second.size()},
                              {"fit_history", h == s->history.end() ? Json::array() : Json(h->second)}});
  }

  Response put_part(const std::string& id, const std::vector<std::string>& path, const Json& body) {
    const JsonReader r(body);
    r.expect_object({"template_id"}, {"continuous_params", "discrete_params", "pose", "target_indices"});
    Json inst = body;
    inst.erase("target_indices");
    ConceptInstance instance = io::instance_from_json(templates, JsonReader(inst), true);
    validate_instance(templates, instance);
    const std::string key = join(path, 0);

    auto s = session(id);
    std::unique_lock lock(s->mutex);
    // Queue behind an optimize of this part so its result is not overwritten.
    s->idle.wait(lock, [&] { return !(s->running() && s->opt_part == key); });

    std::optional<std::vector<std::uint32_t>> indices;
    if (r.has("target_indices")) {
      const JsonReader ti = r.at("target_indices");
      indices.emplace();
      for (std::size_t i = 0; i < ti.array_size(); ++i) {
        const long long v = ti.at(i).integer();
        if (v < 0 || v >= static_cast<long long>(s->cloud.size())) ti.at(i).fail("point index out of range");
        indices->push_back(static_cast<std::uint32_t>(v));
      }
      if (indices->empty()) ti.fail("at least 1 target point required");
    }
    std::vector<ConceptPart>* siblings = &s->doc.parts;
    if (path.size() > 1) {
      ConceptPart* parent = find_part(s->doc.parts, std::vector<std::string>(path.begin(), path.end() - 1), 0);
      if (!parent) throw Error(ErrorKind::kNotFound, "unknown parent part '" + join({path.begin(), path.end() - 1}, 0) + "'");
      siblings = &parent->children;
    }
    ConceptPart* p = find_part(*siblings, {path.back()}, 0);
    if (p) {
      p->instance = std::move(instance);
    } else {
      siblings->push_back({path.back(), std::move(instance), {}});
      p = &siblings->back();
    }
    if (indices) s->targets[key] = std::move(*indices);
    ++s->revision;
    s->dirty = true;
    return json_response(Json{{"revision", s->revision}, {"part", io::parts_to_json(templates, {*p})[0]}});
  }

  // Requires the session lock. World pose of the parent of `path`.
  RigidTransform parent_world(Session& s, const std::vector<std::string>& path) {
    RigidTransform w = RigidTransform::identity();
    std::vector<ConceptPart>* level = &s.doc.parts;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      ConceptPart* p = find_part(*level, {path[i]}, 0);
      w = w * p->instance.pose;
      level = &p->children;
    }
    return w;
  }

  Response optimize(const std::string& id, const Json& body) {
    const JsonReader r(body);
    r.expect_object({"part"}, {"config", "wait", "discrete_search"});
    const std::string key = r.at("part").string();
    const std::vector<std::string> path = split_path(key);
    if (path.empty()) r.at("part").fail("empty part path");
    const FitConfig config = r.has("config") ? fit_config_from_json(r.at("config")) : FitConfig{};
    const bool wait = r.has("wait") ? r.at("wait").boolean() : true;
    const bool discrete = r.has("discrete_search") ? r.at("discrete_search").boolean() : false;

    auto s = session(id);
    ConceptInstance init;
    PointCloud target;
    RigidTransform parent;
    const bool top_level = path.size() == 1;
    {
      std::lock_guard lock(s->mutex);
      if (s->running()) throw Error(ErrorKind::kConflict, "an optimize is already running on part '" + s->opt_part + "'");
      ConceptPart* p = find_part(s->doc.parts, path, 0);
      if (!p) throw Error(ErrorKind::kNotFound, "unknown part '" + key + "'");
      parent = parent_world(*s, path);
      init = p->instance;
      if (!top_level) init.pose = parent * init.pose;
      const auto t = s->targets.find(key);
      if (t == s->targets.end()) {
        target.points = s->cloud.points;
      } else {
        for (auto i : t->second) target.points.push_back(s->cloud.points[i]);
      }
      s->opt_state = "running";
      s->opt_part = key;
      s->opt_trace.clear();
      s->opt_result = nullptr;
      s->opt_error.clear();
    }

    auto run = [this, s, key, path, init, target, parent, top_level, config, discrete]() -> Response {
      auto finish = [&](const std::string& state, Json result, const std::string& error) {
        std::lock_guard lock(s->mutex);
        s->opt_state = state;
        s->opt_result = std::move(result);
        s->opt_error = error;
        s->idle.notify_all();
      };
      try {
        FitResult fr;
        if (discrete) {
          fr = fit_with_discrete(templates, init.template_id, target, config);
        } else {
          fr = fit_continuous(templates, init, target, config, [&](const std::vector<double>& trace) {
            std::lock_guard lock(s->mutex);
            s->opt_trace = trace;
            return !s->cancel.load();
          });
        }
        Json payload = io::fit_result_to_json(templates, fr);
        {
          std::lock_guard lock(s->mutex);
          ConceptPart* p = find_part(s->doc.parts, path, 0);
          if (p && !(fr.best == init)) {
            p->instance = fr.best;
            if (!top_level) p->instance.pose = parent.inverse() * fr.best.pose;
            ++s->revision;
            s->dirty = true;
          }
          s->history[key].push_back(fr.final_loss);
          s->opt_trace = fr.loss_trace;
        }
        Response resp = json_response(payload);
        finish("done", std::move(payload), "");
        return resp;
      } catch (const Error& e) {
        finish("failed", nullptr, e.what());
        return error_response(status_of(e.kind()), e.kind(), e.what());
      } catch (const std::exception& e) {
        finish("failed", nullptr, e.what());
        return error_response(500, ErrorKind::kIo, e.what());
      }
    };
    if (wait) return run();
    std::lock_guard lock(s->mutex);
    s->job = std::async(std::launch::async, [run] { run(); });
    return json_response(Json{{"state", "running"}, {"part", key}}, 202);
  }

  Response save(const std::string& id) {
    auto s = session(id);
    std::lock_guard lock(s->mutex);
    if (s->doc.parts.empty()) throw Error(ErrorKind::kConflict, "cannot save a document without parts");
    const std::string bytes = io::serialize_document(templates, s->doc);
    if (!config.session_dir.empty()) {
      std::string name;
      for (char ch : s->doc.object_id) name += std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' ? ch : '_';
      if (name.empty()) name = s->id;
      std::filesystem::create_directories(config.session_dir);
      io::write_file_atomic(config.session_dir / (name + ".json"), bytes);
      s->saved_path = name + ".json";
    }
    s->dirty = false;
    return {200, bytes};
  }

  Response annotate(const Json& body) {
    const JsonReader r(body);
    r.expect_object({"knowledge_ids"}, {"session_id", "document", "points", "resolution"});
    if (r.has("session_id") == r.has("document")) r.fail("give exactly one of 'session_id' and 'document'");
    std::vector<std::string> ids;
    const JsonReader k = r.at("knowledge_ids");
    for (std::size_t i = 0; i < k.array_size(); ++i) ids.push_back(k.at(i).string());
    const int res = resolution_from(r, "resolution");

    Conceptualization doc;
    PointCloud points;
    if (r.has("session_id")) {
      auto s = session(r.at("session_id").string());
      std::lock_guard lock(s->mutex);
      doc = s->doc;
      points = s->cloud;
    } else {
      doc = io::document_from_json(templates, r.at("document"));
    }
    if (r.has("points")) points.points = flat_points(r.at("points"));
    try {
      return json_response(io::annotation_to_json(annotate_cloud(templates, knowledge, doc, points, ids, res)));
    } catch (const Error& e) {
      // An unknown knowledge id is a bad request here, not a missing resource.
      if (e.kind() == ErrorKind::kNotFound) return error_response(400, e.kind(), e.what());
      throw;
    }
  }

  Response dispatch(const std::string& method, const std::string& path, const std::string& body) {
    const auto seg = split_path(path);
    auto parsed = [&] { return body.empty() ? Json::object() : io::parse_json(body); };
    if (seg.size() == 1 && seg[0] == "templates" && method == "GET") return templates_list();
    if (seg.size() == 1 && seg[0] == "instantiate" && method == "POST") return instantiate(parsed());
    if (seg.size() == 1 && seg[0] == "annotate" && method == "POST") return annotate(parsed());
    if (!seg.empty() && seg[0] == "sessions") {
      if (seg.size() == 1 && method == "POST") return create_session(parsed());
      if (seg.size() == 2 && method == "GET") return get_session(seg[1]);
      if (seg.size() >= 4 && seg[2] == "parts") {
        const std::vector<std::string> part(seg.begin() + 3, seg.end());
        if (method == "GET") return get_part(seg[1], part);
        if (method == "PUT") return put_part(seg[1], part, parsed());
      }
      if (seg.size() == 3 && seg[2] == "optimize" && method == "POST") return optimize(seg[1], parsed());
      if (seg.size() == 3 && seg[2] == "save" && method == "POST") return save(seg[1]);
    }
    return error_response(404, ErrorKind::kNotFound, "no route for " + method + " " + path);
  }
};

Service::Service(TemplateRegistry templates, KnowledgeRegistry knowledge, ServiceConfig config)
    : impl_(std::make_unique<Impl>(std::move(templates), std::move(knowledge), std::move(config))) {}

Service::~Service() {
  {
    std::lock_guard lock(impl_->store_mutex);
    for (auto& [_, s] : impl_->sessions) s->cancel = true;
  }
  wait_idle();
}

void Service::wait_idle() {
  std::vector<std::shared_ptr<Session>> all;
  {
    std::lock_guard lock(impl_->store_mutex);
    for (auto& [_, s] : impl_->sessions) all.push_back(s);
  }
  for (auto& s : all) {
    std::future<void> job;
    {
      std::lock_guard lock(s->mutex);
      job = std::move(s->job);
    }
    if (job.valid()) job.wait();
  }
}

const TemplateRegistry& Service::templates() const { return impl_->templates; }
const KnowledgeRegistry& Service::knowledge() const { return impl_->knowledge; }

Response Service::handle(const std::string& method, const std::string& path, const std::string& body) {
  try {
    return impl_->dispatch(method, path, body);
  } catch (const Error& e) {
    return error_response(status_of(e.kind()), e.kind(), e.what());
  } catch (const std::exception& e) {
    return error_response(500, ErrorKind::kIo, e.what());
  }
}

void Service::mount(httplib::Server& server) {
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    const Response r = handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  server.Get(".*", handler);
  server.Post(".*", handler);
  server.Put(".*", handler);
}

}  // namespace forge::service
