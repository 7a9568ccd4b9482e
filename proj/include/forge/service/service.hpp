#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>

#include "forge/knowledge/knowledge.hpp"
#include "forge/templates/registry.hpp"

namespace httplib {
class Server;
}

namespace forge::service {

struct ServiceConfig {
  // Root for "object_path" in session requests; empty disables path loading.
  std::filesystem::path asset_dir;
  // Where saved documents are written; empty keeps saves in memory only.
  std::filesystem::path session_dir;
  std::size_t max_sessions = 64;
  // Points sampled from an uploaded mesh when no point count is given.
  std::size_t default_sample_count = 4096;
};

struct Response {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// Routes, sessions and optimize jobs. `handle` is the whole API without a
/// socket; `mount` exposes the same routes on an httplib server.
///
///   GET  /templates                     template descriptors
///   POST /instantiate                   instance -> mesh payload
///   POST /sessions                      new session from a mesh, points or object path
///   GET  /sessions/{id}                 state, working document, optimize progress
///   GET  /sessions/{id}/parts/{path}    one part
///   PUT  /sessions/{id}/parts/{path}    create or replace a part
///   POST /sessions/{id}/optimize        fit one part (wait or poll)
///   POST /sessions/{id}/save            canonical document
///   POST /annotate                      annotation set
class Service {
 public:
  Service(TemplateRegistry templates, KnowledgeRegistry knowledge, ServiceConfig config = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  Response handle(const std::string& method, const std::string& path, const std::string& body);

  void mount(httplib::Server& server);

  /// Blocks waiting for running optimize jobs.
  void wait_idle();

  const TemplateRegistry& templates() const;
  const KnowledgeRegistry& knowledge() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace forge::service
