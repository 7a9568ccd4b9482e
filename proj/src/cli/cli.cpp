#include "forge/cli/cli.hpp"

#include <httplib.h>

#include <CLI11.hpp>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>

#include "forge/core/error.hpp"
#include "forge/io/document.hpp"
#include "forge/io/files.hpp"
#include "forge/io/mesh_io.hpp"
#include "forge/io/payload.hpp"
#include "forge/io/sidecar.hpp"
#include "forge/io/stats.hpp"
#include "forge/service/service.hpp"

namespace forge::cli {
namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// name=value pairs
std::map<std::string, std::string> assignments(const std::vector<std::string>& items, const char* flag) {
  std::map<std::string, std::string> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw UsageError(std::string(flag) + " expects name=value, got '" + item + "'");
    }
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

double parse_double(const std::string& s, const std::string& name) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw UsageError("'" + name + "' needs a number, got '" + s + "'");
}

int parse_int(const std::string& s, const std::string& name) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw UsageError("'" + name + "' needs an integer, got '" + s + "'");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto comma = s.find(',', pos);
    const auto end = comma == std::string::npos ? s.size() : comma;
    if (end > pos) out.push_back(s.substr(pos, end - pos));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

struct Context {
  TemplateRegistry templates = builtin_registry();
  KnowledgeRegistry knowledge = builtin_knowledge(templates);
  std::ostream& out;
  std::ostream& err;
};

void require_template(const TemplateRegistry& reg, const std::string& id) {
  if (!reg.contains(id)) throw Error(ErrorKind::kNotFound, "unknown template id '" + id + "'");
}

struct TemplatesCmd {
  std::string format = "text";
  void run(Context& ctx) const {
    if (format == "json") {
      ctx.out << io::canonical_dump(io::template_catalog(ctx.templates, ctx.knowledge));
      return;
    }
    for (const auto& id : ctx.templates.ids()) {
      std::string names;
      for (const auto& p : ctx.templates.param_specs(id)) names += (names.empty() ? "" : ",") + p.name;
      for (const auto& p : ctx.templates.discrete_specs(id)) names += (names.empty() ? "" : ",") + p.name;
      ctx.out << id << '\t' << (ctx.templates.is_geometry(id) ? "geometry" : "concept") << '\t' << names << '\n';
    }
  }
};

struct InstantiateCmd {
  std::string id;
  std::vector<std::string> params, discrete;
  int resolution = 24;
  std::string out;
  void run(Context& ctx) const {
    require_template(ctx.templates, id);
    ConceptInstance inst = default_instance(ctx.templates, id);
    const auto& specs = ctx.templates.param_specs(id);
    const auto& dspecs = ctx.templates.discrete_specs(id);
    for (const auto& [name, value] : assignments(params, "--param")) {
      auto it = std::find_if(specs.begin(), specs.end(), [&](const ParamSpec& s) { return s.name == name; });
      if (it == specs.end()) throw UsageError("template '" + id + "' has no parameter '" + name + "'");
      inst.continuous[static_cast<std::size_t>(it - specs.begin())] = parse_double(value, name);
    }
    for (const auto& [name, value] : assignments(discrete, "--discrete")) {
      auto it = std::find_if(dspecs.begin(), dspecs.end(), [&](const DiscreteParamSpec& s) { return s.name == name; });
      if (it == dspecs.end()) throw UsageError("template '" + id + "' has no discrete parameter '" + name + "'");
      inst.discrete[static_cast<std::size_t>(it - dspecs.begin())] = parse_int(value, name);
    }
    io::save_mesh(out, instantiate_concept(ctx.templates, inst, resolution).merged);
  }
};

struct FitCmd {
  std::string target, template_id, out;
  bool discrete_search = false;
  FitConfig config;
  void run(Context& ctx) const {
    require_template(ctx.templates, template_id);
    const PointCloud cloud = io::load_points(target);
    if (cloud.empty()) throw Error(ErrorKind::kInvalidArgument, target + ": the target cloud has no points");
    const FitResult r = discrete_search
                            ? fit_with_discrete(ctx.templates, template_id, cloud, config)
                            : fit_continuous(ctx.templates, default_init(ctx.templates, template_id, cloud), cloud, config);
    io::write_file_atomic(out, io::canonical_dump(io::fit_result_to_json(ctx.templates, r)));
    ctx.out << "final_loss " << io::Json(r.final_loss).dump() << '\n';
  }
};

struct CorrespondCmd {
  std::string concept_path, points, out;
  int resolution = 24;
  void run(Context& ctx) const {
    const Conceptualization c = io::load_document(ctx.templates, concept_path);
    const PointCloud cloud = io::load_points(points);
    io::save_sidecar(out, build_correspondence(ctx.templates, cloud, c, resolution));
  }
};

struct AnnotateCmd {
  std::string concept_path, points, knowledge, out;
  int resolution = 24;
  void run(Context& ctx) const {
    const std::vector<std::string> ids = split_list(knowledge);
    if (ids.empty()) throw UsageError("--knowledge needs at least one id");
    for (const auto& id : ids) ctx.knowledge.get(id);
    const Conceptualization c = io::load_document(ctx.templates, concept_path);
    PointCloud cloud;
    if (!points.empty()) cloud = io::load_points(points);
    const AnnotationSet a = annotate_cloud(ctx.templates, ctx.knowledge, c, cloud, ids, resolution);
    fs::create_directories(out);
    io::Json poses = io::Json::array();
    for (const auto& p : a.poses) poses.push_back(io::pose_annotation_to_json(p));
    io::write_file_atomic(fs::path(out) / "regions.tsv", io::region_table(a));
    io::write_file_atomic(fs::path(out) / "poses.json",
                          io::canonical_dump(io::Json{{"conceptualization_id", a.conceptualization_id},
                                                      {"knowledge_ids", a.knowledge_ids},
                                                      {"poses", std::move(poses)}}));
  }
};

struct StatsCmd {
  std::string dir, format = "table";
  void run(Context& ctx) const {
    const io::AssetStats s = io::compute_stats(ctx.templates, dir);
    if (format == "machine") {
      ctx.out << io::canonical_dump(io::stats_to_json(s));
    } else {
      ctx.out << io::format_stats_table(s);
      for (const auto& f : s.skipped) ctx.err << "skipped " << f.file << ": " << f.reason << '\n';
    }
  }
};

httplib::Server* g_server = nullptr;
extern "C" void stop_server(int) {
  if (g_server) g_server->stop();
}

struct ServeCmd {
  std::string host = "127.0.0.1";
  int port = 8080;
  service::ServiceConfig config;
  void run(Context& ctx) const {
    service::Service svc(ctx.templates, ctx.knowledge, config);
    httplib::Server server;
    svc.mount(server);
    if (!server.bind_to_port(host, port)) throw Error(ErrorKind::kIo, "cannot listen on " + host + ":" + std::to_string(port));
    g_server = &server;
    std::signal(SIGINT, stop_server);
    std::signal(SIGTERM, stop_server);
    ctx.err << "forge serving on http://" << host << ":" << port << '\n';
    server.listen_after_bind();
    g_server = nullptr;
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"forge: concept templates, fitting, correspondence, annotation and asset statistics", "forge"};
  app.require_subcommand(1);

  TemplatesCmd templates;
  auto* t = app.add_subcommand("templates", "template library");
  auto* tl = t->add_subcommand("list", "list templates sorted by id");
  tl->add_option("--format", templates.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  t->require_subcommand(1);

  InstantiateCmd inst;
  auto* i = app.add_subcommand("instantiate", "write a template instance as a mesh");
  i->add_option("id", inst.id, "template id")->required();
  i->add_option("--param", inst.params, "continuous parameter, name=value (repeatable)");
  i->add_option("--discrete", inst.discrete, "discrete parameter, name=value (repeatable)");
  i->add_option("--resolution", inst.resolution, "tessellation resolution")->check(CLI::Range(3, 512));
  i->add_option("--out", inst.out, "output .obj or .ply")->required();

  FitCmd fit;
  auto* f = app.add_subcommand("fit", "fit a template to a point cloud");
  f->add_option("--target", fit.target, "target .ply or .obj (vertices are the points)")->required();
  f->add_option("--template", fit.template_id, "template id")->required();
  f->add_flag("--discrete-search", fit.discrete_search, "search the discrete grid");
  f->add_option("--seed", fit.config.seed, "random seed");
  f->add_option("--max-iters", fit.config.max_iters, "iterations per descent");
  f->add_option("--samples", fit.config.mesh_samples, "mesh samples per loss evaluation");
  f->add_option("--multi-start", fit.config.multi_start, "descents per discrete cell");
  f->add_option("--resolution", fit.config.resolution, "tessellation resolution");
  f->add_option("--out", fit.out, "output JSON")->required();

  CorrespondCmd corr;
  auto* c = app.add_subcommand("correspond", "build a correspondence sidecar");
  c->add_option("--concept", corr.concept_path, "conceptualization document")->required();
  c->add_option("--points", corr.points, "object points (.ply or .obj)")->required();
  c->add_option("--resolution", corr.resolution, "tessellation resolution")->check(CLI::Range(3, 512));
  c->add_option("--out", corr.out, "output sidecar")->required();

  AnnotateCmd anno;
  auto* a = app.add_subcommand("annotate", "propagate knowledge to object points");
  a->add_option("--concept", anno.concept_path, "conceptualization document")->required();
  a->add_option("--points", anno.points, "object points (.ply or .obj)");
  a->add_option("--knowledge", anno.knowledge, "comma-separated knowledge ids")->required();
  a->add_option("--resolution", anno.resolution, "tessellation resolution")->check(CLI::Range(3, 512));
  a->add_option("--out", anno.out, "output directory")->required();

  StatsCmd stats;
  auto* s = app.add_subcommand("stats", "asset statistics of a directory of documents");
  s->add_option("dir", stats.dir, "directory")->required();
  s->add_option("--format", stats.format, "table or machine")->check(CLI::IsMember({"table", "machine"}));

  ServeCmd serve;
  auto* v = app.add_subcommand("serve", "run the HTTP service");
  v->add_option("--host", serve.host, "bind address");
  v->add_option("--port", serve.port, "port")->check(CLI::Range(1, 65535));
  v->add_option("--asset-dir", serve.config.asset_dir, "root for object_path requests");
  v->add_option("--session-dir", serve.config.session_dir, "where saved documents go");
  v->add_option("--max-sessions", serve.config.max_sessions, "in-memory session bound")->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "forge: " << e.what() << "\n" << app.help();
    return kUsage;
  }

  Context ctx{.out = out, .err = err};
  try {
    if (*tl) templates.run(ctx);
    if (*i) inst.run(ctx);
    if (*f) fit.run(ctx);
    if (*c) corr.run(ctx);
    if (*a) anno.run(ctx);
    if (*s) stats.run(ctx);
    if (*v) serve.run(ctx);
  } catch (const UsageError& e) {
    err << "forge: " << e.what() << "\n";
    for (auto* sub : app.get_subcommands()) err << sub->help();
    return kUsage;
  } catch (const Error& e) {
    err << "forge: " << e.what() << "\n";
    return e.kind() == ErrorKind::kNumeric ? kNumericFailure : kData;
  } catch (const std::exception& e) {
    err << "forge: " << e.what() << "\n";
    return kData;
  }
  return kOk;
}

}  // namespace forge::cli
