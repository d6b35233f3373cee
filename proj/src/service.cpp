#include "evseq/service.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include <httplib.h>

namespace evseq {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::string cur;
  std::string clean = path.substr(0, path.find('?'));
  for (char c : clean) {
    if (c == '/') {
      if (!cur.empty()) parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) parts.push_back(cur);
  return parts;
}

HttpResponse json_response(int status, const json& body) { return {status, body.dump(), "application/json"}; }

HttpResponse error_response(int status, const std::string& code, const std::string& message,
                            const std::optional<std::string>& field = std::nullopt) {
  return json_response(status, error_body(code, message, field));
}

std::string content_id(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[24];
  std::snprintf(buf, sizeof buf, "ds-%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string random_token() {
  static std::mutex m;
  static std::random_device rd;
  static std::mt19937_64 rng(rd());
  std::lock_guard lock(m);
  char buf[40];
  std::snprintf(buf, sizeof buf, "s-%016llx%016llx", static_cast<unsigned long long>(rng()),
                static_cast<unsigned long long>(rng()));
  return buf;
}

std::optional<std::size_t> parse_index(const std::string& s) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

struct DatasetGone : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool valid_id(const std::string& id) {
  if (id.empty() || id.size() > 64) return false;
  for (char c : id) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-') return false;
  }
  return true;
}

}  // namespace

json error_body(const std::string& code, const std::string& message, const std::optional<std::string>& field) {
  json j{{"code", code}, {"message", message}};
  if (field) j["field"] = *field;
  return j;
}

ServiceConfig ServiceConfig::from_environment() {
  ServiceConfig cfg;
  if (const char* dir = std::getenv("DATA_DIR"); dir && *dir) cfg.data_dir = fs::path(dir);
  if (const char* max = std::getenv("MAX_UPLOAD_BYTES"); max && *max) {
    if (auto v = parse_index(max)) cfg.max_upload_bytes = *v;
  }
  return cfg;
}

struct Service::Session {
  std::string id;
  std::string dataset_id;
  std::mutex update_mutex;  // serializes patches
  mutable std::mutex state_mutex;
  std::shared_ptr<const OverviewParams> state;

  std::shared_ptr<const OverviewParams> snapshot() const {
    std::lock_guard lock(state_mutex);
    return state;
  }
  void publish(std::shared_ptr<const OverviewParams> next) {
    std::lock_guard lock(state_mutex);
    state = std::move(next);
  }
  json to_json() const {
    return json{{"session_id", id}, {"dataset_id", dataset_id}, {"state", params_to_json(*snapshot())}};
  }
};

struct Service::CachedOverview {
  OverviewLayout layout;
  std::string document;
};

Service::Service(ServiceConfig config) : config_(std::move(config)) {
  if (config_.data_dir) {
    fs::create_directories(*config_.data_dir / "datasets");
    fs::create_directories(*config_.data_dir / "sessions");
    load_persisted();
  }
}

Service::~Service() = default;

std::size_t Service::dataset_count() const {
  std::shared_lock lock(registry_mutex_);
  return datasets_.size();
}

std::size_t Service::session_count() const {
  std::shared_lock lock(registry_mutex_);
  return sessions_.size();
}

HttpResponse Service::handle(const HttpRequest& req) {
  const auto parts = split_path(req.path);
  const std::string& m = req.method;
  try {
    if (parts.size() == 1 && parts[0] == "datasets" && m == "POST") return create_dataset(req.body);
    if (parts.size() == 3 && parts[0] == "datasets" && parts[2] == "summary" && m == "GET") {
      return dataset_summary_response(parts[1]);
    }
    if (parts.size() == 3 && parts[0] == "datasets" && parts[2] == "sessions" && m == "POST") {
      return create_session(parts[1]);
    }
    if (parts.size() == 3 && parts[0] == "sessions" && parts[2] == "overview" && m == "GET") {
      return get_overview(parts[1]);
    }
    if (parts.size() == 2 && parts[0] == "sessions" && m == "PATCH") return update_session(parts[1], req.body);
    if (parts.size() == 2 && parts[0] == "sessions" && m == "DELETE") return delete_session(parts[1]);
    if (parts.size() == 5 && parts[0] == "sessions" && parts[2] == "eventbox" && m == "GET") {
      return event_box_detail(parts[1], parts[3], parts[4]);
    }
    const bool known_path =
        (parts.size() == 1 && parts[0] == "datasets") || (parts.size() == 2 && parts[0] == "sessions") ||
        (parts.size() == 3 && parts[0] == "datasets" && (parts[2] == "summary" || parts[2] == "sessions")) ||
        (parts.size() == 3 && parts[0] == "sessions" && parts[2] == "overview") ||
        (parts.size() == 5 && parts[0] == "sessions" && parts[2] == "eventbox");
    if (known_path) return error_response(405, "MethodNotAllowed", m + " not allowed on " + req.path);
    return error_response(404, "NotFound", "no route for " + m + " " + req.path);
  } catch (const std::exception& e) {
    return error_response(500, "InternalError", e.what());
  }
}

std::string Service::register_dataset(const std::string& csv, bool persist) {
  std::string id = content_id(csv);
  {
    std::shared_lock lock(registry_mutex_);
    if (datasets_.contains(id)) return id;
  }
  auto ds = std::make_shared<const Dataset>(parse_event_log_string(csv));
  if (persist && config_.data_dir) {
    std::ofstream out(*config_.data_dir / "datasets" / (id + ".csv"), std::ios::binary);
    out << csv;
  }
  std::unique_lock lock(registry_mutex_);
  datasets_.try_emplace(id, std::move(ds));
  return id;
}

HttpResponse Service::create_dataset(const std::string& body) {
  if (body.size() > config_.max_upload_bytes) {
    return error_response(413, "PayloadTooLarge",
                          "upload exceeds " + std::to_string(config_.max_upload_bytes) + " bytes");
  }
  std::string id;
  try {
    id = register_dataset(body, true);
  } catch (const IngestError& e) {
    json err = error_body(to_string(e.kind()), e.what());
    if (e.line() > 0) err["line"] = e.line();
    return json_response(400, err);
  }
  HttpResponse r = dataset_summary_response(id);
  if (r.status == 200) r.status = 201;
  return r;
}

HttpResponse Service::dataset_summary_response(const std::string& id) {
  auto ds = find_dataset(id);
  if (!ds) return error_response(404, "NotFound", "unknown dataset '" + id + "'");
  json j = dataset_summary(*ds);
  j["dataset_id"] = id;
  return json_response(200, j);
}

HttpResponse Service::create_session(const std::string& dataset_id) {
  if (!find_dataset(dataset_id)) return error_response(404, "NotFound", "unknown dataset '" + dataset_id + "'");
  auto s = std::make_shared<Session>();
  s->id = random_token();
  s->dataset_id = dataset_id;
  s->state = std::make_shared<const OverviewParams>();
  persist_session_line(s->id, json{{"dataset_id", dataset_id}}.dump(), true);
  {
    std::unique_lock lock(registry_mutex_);
    sessions_[s->id] = s;
  }
  return json_response(201, s->to_json());
}

std::shared_ptr<Service::Session> Service::find_session(const std::string& id) const {
  std::shared_lock lock(registry_mutex_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

std::shared_ptr<const Dataset> Service::find_dataset(const std::string& id) const {
  std::shared_lock lock(registry_mutex_);
  auto it = datasets_.find(id);
  return it == datasets_.end() ? nullptr : it->second;
}

std::shared_ptr<const Service::CachedOverview> Service::overview_for(const Session& session) {
  auto ds = find_dataset(session.dataset_id);
  if (!ds) throw DatasetGone("dataset '" + session.dataset_id + "' was deleted");
  auto state = session.snapshot();
  std::string key = session.dataset_id + '\n' + params_to_json(*state).dump();
  {
    std::lock_guard lock(cache_mutex_);
    for (auto it = cache_.begin(); it != cache_.end(); ++it) {
      if (it->first == key) {
        auto hit = it->second;
        cache_.erase(it);
        cache_.emplace_back(key, hit);
        return hit;
      }
    }
  }
  auto computed = std::make_shared<CachedOverview>();
  computed->layout = compute_overview(*ds, *state);
  computed->document = layout_document(computed->layout);
  std::lock_guard lock(cache_mutex_);
  cache_.emplace_back(key, computed);
  while (cache_.size() > config_.cache_entries) cache_.erase(cache_.begin());
  return computed;
}

HttpResponse Service::get_overview(const std::string& session_id) {
  auto s = find_session(session_id);
  if (!s) return error_response(404, "NotFound", "unknown session '" + session_id + "'");
  try {
    return {200, overview_for(*s)->document, "application/json"};
  } catch (const ParamError& e) {
    return error_response(422, "ValidationError", e.what(), e.field());
  } catch (const DatasetGone& e) {
    return error_response(409, "DatasetDeleted", e.what());
  }
}

HttpResponse Service::update_session(const std::string& session_id, const std::string& body) {
  auto s = find_session(session_id);
  if (!s) return error_response(404, "NotFound", "unknown session '" + session_id + "'");
  json patch;
  try {
    patch = json::parse(body);
  } catch (const json::exception& e) {
    return error_response(400, "InvalidJson", e.what());
  }
  auto ds = find_dataset(s->dataset_id);
  if (!ds) return error_response(409, "DatasetDeleted", "dataset '" + s->dataset_id + "' was deleted");

  std::lock_guard lock(s->update_mutex);
  try {
    auto next = std::make_shared<const OverviewParams>(apply_patch(*s->snapshot(), patch));
    validate_params(*next, *ds);
    persist_session_line(s->id, patch.dump(), false);
    s->publish(std::move(next));
  } catch (const ParamError& e) {
    return error_response(422, "ValidationError", e.what(), e.field());
  }
  return json_response(200, s->to_json());
}

HttpResponse Service::event_box_detail(const std::string& session_id, const std::string& row_text,
                                       const std::string& col_text) {
  auto s = find_session(session_id);
  if (!s) return error_response(404, "NotFound", "unknown session '" + session_id + "'");
  auto row = parse_index(row_text);
  auto col = parse_index(col_text);
  if (!row || !col) return error_response(404, "NotFound", "row and column must be unsigned integers");
  std::shared_ptr<const CachedOverview> ov;
  try {
    ov = overview_for(*s);
  } catch (const ParamError& e) {
    return error_response(422, "ValidationError", e.what(), e.field());
  } catch (const DatasetGone& e) {
    return error_response(409, "DatasetDeleted", e.what());
  }
  if (*row >= ov->layout.rows.size()) return error_response(404, "NotFound", "row out of range");
  const auto& lr = ov->layout.rows[*row];
  for (const auto& box : lr.boxes) {
    if (box.column != *col) continue;
    json points = json::array();
    for (const auto& p : box.points) {
      json pj{{"member_ref", p.member_ref},
              {"duration", p.duration},
              {"occurrence", format_timestamp(p.occurrence)},
              {"axis_pos", p.axis_pos},
              {"is_outlier", p.is_outlier}};
      pj["color_key"] = p.color_key ? json(*p.color_key) : json(nullptr);
      points.push_back(std::move(pj));
    }
    json j{{"row", *row},
           {"column", *col},
           {"signature", lr.signature},
           {"position", box.position},
           {"event_type", box.event_type},
           {"count", box.count},
           {"q", box.q},
           {"fence", {box.fence.lower, box.fence.upper}},
           {"lod", to_string(box.lod.preset)},
           {"points", points}};
    return json_response(200, j);
  }
  return error_response(404, "NotFound", "cell is not occupied");
}

HttpResponse Service::delete_session(const std::string& session_id) {
  {
    std::unique_lock lock(registry_mutex_);
    if (sessions_.erase(session_id) == 0) {
      return error_response(404, "NotFound", "unknown session '" + session_id + "'");
    }
  }
  if (config_.data_dir && valid_id(session_id)) {
    std::error_code ec;
    fs::remove(*config_.data_dir / "sessions" / (session_id + ".jsonl"), ec);
  }
  return json_response(200, json{{"deleted", session_id}});
}

bool Service::delete_dataset(const std::string& dataset_id) {
  {
    std::unique_lock lock(registry_mutex_);
    if (datasets_.erase(dataset_id) == 0) return false;
  }
  if (config_.data_dir && valid_id(dataset_id)) {
    std::error_code ec;
    fs::remove(*config_.data_dir / "datasets" / (dataset_id + ".csv"), ec);
  }
  return true;
}

void Service::persist_session_line(const std::string& session_id, const std::string& line, bool truncate) const {
  if (!config_.data_dir) return;
  auto mode = std::ios::binary | (truncate ? std::ios::trunc : std::ios::app);
  std::ofstream out(*config_.data_dir / "sessions" / (session_id + ".jsonl"), mode);
  out << line << '\n';
}

void Service::load_persisted() {
  for (const auto& entry : fs::directory_iterator(*config_.data_dir / "datasets")) {
    if (entry.path().extension() != ".csv") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string csv = buf.str();
    if (content_id(csv) != entry.path().stem().string()) continue;
    try {
      register_dataset(csv, false);
    } catch (const IngestError&) {
    }
  }
  for (const auto& entry : fs::directory_iterator(*config_.data_dir / "sessions")) {
    if (entry.path().extension() != ".jsonl") continue;
    std::ifstream in(entry.path());
    std::string line;
    if (!std::getline(in, line)) continue;
    auto header = json::parse(line, nullptr, false);
    if (header.is_discarded() || !header.contains("dataset_id")) continue;
    auto s = std::make_shared<Session>();
    s->id = entry.path().stem().string();
    s->dataset_id = header["dataset_id"].get<std::string>();
    OverviewParams params;
    auto ds = find_dataset(s->dataset_id);
    // Replay; a patch that no longer validates is skipped, as it was rejected originally.
    while (std::getline(in, line)) {
      auto patch = json::parse(line, nullptr, false);
      if (patch.is_discarded()) continue;
      try {
        OverviewParams next = apply_patch(params, patch);
        if (ds) validate_params(next, *ds);
        params = std::move(next);
      } catch (const ParamError&) {
      }
    }
    s->state = std::make_shared<const OverviewParams>(std::move(params));
    std::unique_lock lock(registry_mutex_);
    sessions_[s->id] = s;
  }
}

// ---------------------------------------------------------------------------
// HTTP adapter
// ---------------------------------------------------------------------------

struct HttpServer::Impl {
  Service& service;
  httplib::Server server;
  explicit Impl(Service& s) : service(s) {}
};

HttpServer::HttpServer(Service& service, std::size_t max_payload_bytes) : impl_(std::make_unique<Impl>(service)) {
  // Leave headroom so Service::handle reports oversize uploads with a JSON body.
  impl_->server.set_payload_max_length(max_payload_bytes + (1u << 20));
  auto forward = [this](const httplib::Request& req, httplib::Response& res) {
    HttpResponse r = impl_->service.handle(HttpRequest{req.method, req.path, req.body});
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  impl_->server.Get(R"(/.*)", forward);
  impl_->server.Post(R"(/.*)", forward);
  impl_->server.Patch(R"(/.*)", forward);
  impl_->server.Delete(R"(/.*)", forward);
  impl_->server.Put(R"(/.*)", forward);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace evseq
