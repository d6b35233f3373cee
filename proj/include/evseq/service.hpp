#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "evseq/engine.hpp"

namespace evseq {

struct ServiceConfig {
  std::optional<std::filesystem::path> data_dir;  // no persistence when unset
  std::size_t max_upload_bytes = 64u << 20;
  std::size_t cache_entries = 32;

  // LISTEN_ADDR is read by the server binary; this picks up DATA_DIR and MAX_UPLOAD_BYTES.
  static ServiceConfig from_environment();
};

struct HttpRequest {
  std::string method;
  std::string path;
  std::string body;
};

struct HttpResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

// Datasets, sessions and the overview cache. Transport independent: the HTTP
// adapter below forwards every request to handle().
//
// Concurrency: the registry is guarded by a shared mutex; each session
// serializes its own updates and publishes immutable state snapshots, so a
// reader sees either the pre- or the post-patch state.
class Service {
 public:
  explicit Service(ServiceConfig config = {});
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  HttpResponse handle(const HttpRequest& request);

  // Removes a dataset; sessions on it then answer 409.
  bool delete_dataset(const std::string& dataset_id);

  std::size_t dataset_count() const;
  std::size_t session_count() const;

 private:
  struct Session;
  struct CachedOverview;

  HttpResponse create_dataset(const std::string& body);
  HttpResponse dataset_summary_response(const std::string& id);
  HttpResponse create_session(const std::string& dataset_id);
  HttpResponse get_overview(const std::string& session_id);
  HttpResponse update_session(const std::string& session_id, const std::string& body);
  HttpResponse event_box_detail(const std::string& session_id, const std::string& row, const std::string& col);
  HttpResponse delete_session(const std::string& session_id);

  std::shared_ptr<Session> find_session(const std::string& id) const;
  std::shared_ptr<const Dataset> find_dataset(const std::string& id) const;
  // Throws ParamError (422), or an internal error type when the dataset was deleted (409).
  std::shared_ptr<const CachedOverview> overview_for(const Session& session);

  std::string register_dataset(const std::string& csv, bool persist);
  void load_persisted();
  void persist_session_line(const std::string& session_id, const std::string& line, bool truncate) const;

  ServiceConfig config_;
  mutable std::shared_mutex registry_mutex_;
  std::map<std::string, std::shared_ptr<const Dataset>> datasets_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;

  std::mutex cache_mutex_;
  std::vector<std::pair<std::string, std::shared_ptr<const CachedOverview>>> cache_;  // most recent last
};

nlohmann::json error_body(const std::string& code, const std::string& message,
                          const std::optional<std::string>& field = std::nullopt);

// cpp-httplib binding.
class HttpServer {
 public:
  explicit HttpServer(Service& service, std::size_t max_payload_bytes);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Returns the bound port (an ephemeral one when port is 0), or -1.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  bool listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace evseq
