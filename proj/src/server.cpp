#include "enacode/server.hpp"

#include "enacode/csv.hpp"
#include "enacode/error.hpp"
#include "enacode/io.hpp"
#include "enacode/pipeline.hpp"
#include "enacode/topics.hpp"

#include <httplib.h>

#include <cstdlib>
#include <sstream>

namespace enacode::service {

namespace fs = std::filesystem;
namespace files = pipeline::files;
using nlohmann::json;

int port_from_env(int fallback) {
  const char* env = std::getenv("ENACODE_PORT");
  if (!env || !*env)
    return fallback;
  char* end = nullptr;
  const long port = std::strtol(env, &end, 10);
  if (*end != '\0' || port < 0 || port > 65535)
    return fallback;
  return static_cast<int>(port);
}

namespace {

Response ok(json body) {
  body["v"] = pipeline::kSchemaVersion;
  return {200, std::move(body)};
}

Response error(int status, const std::string& message, json fields = json::array()) {
  return {status, json{{"v", pipeline::kSchemaVersion},
                       {"error", {{"status", status}, {"message", message}, {"fields", fields}}}}};
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : path) {
    if (c == '/') {
      if (!cur.empty())
        parts.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty())
    parts.push_back(std::move(cur));
  return parts;
}

std::optional<std::string> manifest_id(const fs::path& dir) {
  const auto path = dir / files::manifest;
  if (!fs::is_regular_file(path))
    return std::nullopt;
  try {
    const auto m = json::parse(io::read_text(path.string()));
    if (m.contains("run_id") && m["run_id"].is_string())
      return m["run_id"].get<std::string>();
  } catch (const std::exception&) {
  }
  return std::nullopt;
}

json csv_rows(const std::string& text) {
  const auto records = csv::parse(text);
  json rows = json::array();
  for (std::size_t i = 1; i < records.size(); ++i) {
    json row = json::object();
    for (std::size_t c = 0; c < records[0].fields.size() && c < records[i].fields.size(); ++c)
      row[records[0].fields[c]] = records[i].fields[c];
    rows.push_back(std::move(row));
  }
  return rows;
}

json topics_view(const pipeline::Workspace& ws) {
  const auto summaries = topics::parse_summaries_csv(ws.require(files::topics, "topics"));
  std::map<std::string, std::string> topic_map;
  if (ws.has(files::scheme)) {
    const auto scheme = json::parse(ws.read(files::scheme));
    if (scheme.contains("topic_map"))
      for (const auto& [k, v] : scheme["topic_map"].items())
        topic_map[k] = v.get<std::string>();
  }
  json topics = json::array();
  for (const auto& s : summaries) {
    json words = json::array();
    for (std::size_t r = 0; r < s.terms.size(); ++r)
      words.push_back({{"term", s.terms[r]}, {"prob", s.probabilities[r]}});
    auto it = topic_map.find(std::to_string(s.topic_id));
    topics.push_back({{"topic_id", s.topic_id},
                      {"code", it == topic_map.end() ? json(nullptr) : json(it->second)},
                      {"words", words}});
  }
  json coherence = json::array();
  int selected = 0;
  for (const auto& row : csv_rows(ws.require(files::coherence, "topics"))) {
    const int k = std::stoi(row.at("k").get<std::string>());
    const bool sel = row.at("selected").get<std::string>() == "1";
    if (sel)
      selected = k;
    coherence.push_back(
        {{"k", k}, {"coherence", std::stod(row.at("coherence").get<std::string>())}, {"selected", sel}});
  }
  return json{{"selected_k", selected}, {"coherence", coherence}, {"topics", topics}};
}

json kappa_view(const pipeline::Workspace& ws) {
  return json{{"lda_only", ws.require_json(files::kappa_lda_json, "agreement").at("per_code")},
              {"lda_plus_instructor", ws.require_json(files::kappa_json, "agreement").at("per_code")}};
}

} // namespace

Api::Api(fs::path root) : root_(std::move(root)) {}

std::map<std::string, fs::path> Api::runs() const {
  std::map<std::string, fs::path> out;
  if (!fs::is_directory(root_))
    return out;
  if (auto id = manifest_id(root_))
    out.emplace(*id, root_);
  std::vector<fs::path> children;
  for (const auto& entry : fs::directory_iterator(root_))
    if (entry.is_directory())
      children.push_back(entry.path());
  std::sort(children.begin(), children.end());
  for (const auto& dir : children)
    if (auto id = manifest_id(dir))
      out.emplace(*id, dir); // first directory wins for duplicate ids
  return out;
}

Api::RunLocks& Api::locks_for(const std::string& id) {
  std::lock_guard guard(locks_guard_);
  auto& slot = locks_[id];
  if (!slot)
    slot = std::make_unique<RunLocks>();
  return *slot;
}

Response Api::list_runs() const {
  json list = json::array();
  for (const auto& [id, dir] : runs()) {
    json entry{{"id", id}, {"dir", dir.lexically_relative(root_).string()}};
    try {
      const auto m = json::parse(io::read_text((dir / files::manifest).string()));
      entry["stages"] = m.value("stages", json::object());
      entry["updated_at"] = m.value("updated_at", "");
    } catch (const std::exception&) {
    }
    list.push_back(std::move(entry));
  }
  return ok(json{{"runs", list}});
}

Response Api::get_artifact(const std::string& id, const fs::path& dir, const std::string& what,
                           const Request& req) {
  auto& locks = locks_for(id);
  std::shared_lock read(locks.files);
  pipeline::Workspace ws(dir);
  json body{{"run", id}};
  if (what == "topics") {
    body.update(topics_view(ws));
  } else if (what == "scheme") {
    auto scheme = ws.require_json(files::scheme, "code");
    body["revision"] = scheme.value("revision", 0);
    scheme.erase("revision");
    scheme.erase("v");
    body["scheme"] = scheme;
  } else if (what == "kappa") {
    body.update(kappa_view(ws));
  } else if (what == "ena/space") {
    auto space = ws.require_json(files::ena_space, "ena");
    space.erase("v");
    body["space"] = space;
  } else if (what == "ena/network") {
    auto it = req.params.find("group");
    const std::string group = it == req.params.end() ? "" : it->second;
    if (group != "algorithm" && group != "human" && group != "difference")
      return error(422, "unknown network group",
                   json::array({{{"field", "group"},
                                 {"message", "must be algorithm, human or difference"}}}));
    const auto networks = ws.require_json(files::networks, "ena");
    body["group"] = group;
    body["accumulation"] = networks.at("accumulation");
    body["network"] = networks.at(group);
  } else if (what == "ena/units") {
    const auto networks = ws.require_json(files::networks, "ena");
    body["accumulation"] = networks.at("accumulation");
    body["units"] = networks.at("units");
  } else if (what == "ena/excerpts") {
    json fields = json::array();
    for (const char* key : {"unit", "source", "a", "b"})
      if (!req.params.count(key))
        fields.push_back({{"field", key}, {"message", "required query parameter"}});
    if (!fields.empty())
      return error(422, "missing query parameters", fields);
    const auto source = parse_source(req.params.at("source"));
    json list = json::array();
    for (const auto& e : pipeline::connection_excerpts(ws, req.params.at("unit"), source,
                                                       req.params.at("a"), req.params.at("b")))
      list.push_back({{"entry_id", e.entry_id}, {"text", e.text}, {"codes", e.codes}, {"keywords", e.keywords}});
    body["excerpts"] = list;
  } else if (what == "stats") {
    auto stats = ws.require_json(files::stats_json, "stats");
    stats.erase("v");
    body.update(stats);
  } else {
    return error(404, "no such endpoint");
  }
  return ok(std::move(body));
}

Response Api::put_scheme(const std::string& id, const fs::path& dir, const Request& req) {
  json payload;
  try {
    payload = json::parse(req.body);
  } catch (const json::exception& e) {
    return error(422, std::string("body is not JSON: ") + e.what(),
                 json::array({{{"field", ""}, {"message", "invalid JSON"}}}));
  }
  json fields = json::array();
  if (!payload.is_object() || !payload.contains("revision") || !payload["revision"].is_number_integer())
    fields.push_back({{"field", "revision"}, {"message", "required integer"}});
  if (!payload.is_object() || !payload.contains("scheme"))
    fields.push_back({{"field", "scheme"}, {"message", "required object"}});
  if (!fields.empty())
    return error(422, "invalid scheme payload", fields);

  auto& locks = locks_for(id);
  std::unique_lock writer(locks.writer, std::try_to_lock);
  if (!writer.owns_lock())
    return error(409, "another scheme edit is in progress for this run; re-fetch and retry");

  pipeline::Workspace ws(dir);
  pipeline::SchemeUpdate update;
  try {
    update = pipeline::update_scheme(ws, payload["scheme"], payload["revision"].get<int>());
  } catch (const pipeline::RevisionConflict& e) {
    return error(409, e.what());
  } catch (const pipeline::InvalidScheme& e) {
    json errs = json::array();
    for (const auto& f : e.errors())
      errs.push_back({{"field", "scheme." + f.field}, {"message", f.message}});
    return error(422, "invalid scheme", errs);
  }
  json artifacts = json::object();
  for (const auto& [name, data] : ws.staged())
    artifacts[name] = pipeline::sha256_hex(data);
  {
    std::unique_lock publish(locks.files);
    ws.commit(update.stages);
  }
  json body{{"run", id}, {"revision", update.revision}, {"stages", update.stages}, {"artifacts", artifacts}};
  std::shared_lock read(locks.files);
  if (ws.has(files::kappa_json))
    body.update(kappa_view(ws));
  return ok(std::move(body));
}

Response Api::handle(const Request& req) {
  const auto parts = split_path(req.path);
  if (parts.empty() || parts[0] != "runs")
    return error(404, "no such endpoint");
  try {
    if (parts.size() == 1)
      return req.method == "GET" ? list_runs() : error(405, "method not allowed");
    const auto all = runs();
    auto it = all.find(parts[1]);
    if (it == all.end())
      return error(404, "unknown run '" + parts[1] + "'");
    std::string what;
    for (std::size_t i = 2; i < parts.size(); ++i)
      what += (i > 2 ? "/" : "") + parts[i];
    if (what == "scheme" && req.method == "PUT")
      return put_scheme(it->first, it->second, req);
    if (req.method != "GET")
      return error(405, "method not allowed");
    return get_artifact(it->first, it->second, what, req);
  } catch (const StageError& e) {
    return error(404, e.what());
  } catch (const Error& e) {
    return error(422, e.what());
  } catch (const std::exception& e) {
    return error(500, e.what());
  }
}

// ---------------------------------------------------------------------------

Server::Server(fs::path root, std::optional<fs::path> static_dir)
    : api_(std::move(root)), http_(std::make_unique<httplib::Server>()) {
  auto forward = [this](const httplib::Request& req, httplib::Response& res) {
    Request r{req.method, req.path, {}, req.body};
    for (const auto& [k, v] : req.params)
      r.params.emplace(k, v);
    const auto out = api_.handle(r);
    res.status = out.status;
    res.set_content(out.body.dump(), "application/json");
  };
  http_->Get("/runs(/.*)?", forward);
  http_->Put("/runs(/.*)?", forward);
  if (static_dir)
    http_->set_mount_point("/", static_dir->string());
  http_->set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) {
      json body{{"v", pipeline::kSchemaVersion},
                {"error", {{"status", res.status}, {"message", "no such endpoint"}, {"fields", json::array()}}}};
      res.set_content(body.dump(), "application/json");
    }
  });
}

Server::~Server() = default;

int Server::bind(const std::string& host, int port) {
  if (port == 0)
    return http_->bind_to_any_port(host);
  if (!http_->bind_to_port(host, port))
    throw Error("cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void Server::listen() { http_->listen_after_bind(); }
void Server::stop() { http_->stop(); }
void Server::wait_until_ready() const { http_->wait_until_ready(); }

} // namespace enacode::service
