#include "varicart/triage_http.hpp"

#include <sstream>

#include "httplib.h"
#include "json.hpp"

namespace varicart {

using nlohmann::json;

namespace {

json tokens_json(const std::vector<TokenContribution>& tokens) {
  json a = json::array();
  for (const auto& t : tokens)
    a.push_back({{"token", t.token}, {"begin", t.begin}, {"end", t.end}, {"score", t.contribution}});
  return a;
}

json error_json(const std::string& message) { return {{"error", message}}; }

void reply(httplib::Response& res, int status, const std::string& body,
           const char* type = "application/json; charset=utf-8") {
  res.status = status;
  res.set_content(body, type);
}

}  // namespace

std::string queue_json(const std::vector<CandidateView>& batch) {
  json a = json::array();
  for (const auto& v : batch)
    a.push_back({{"id", v.id},
                 {"text", v.text},
                 {"score", v.score},
                 {"rank", v.rank},
                 {"current_label", v.current_label},
                 {"top_tokens", tokens_json(v.top_tokens)}});
  return a.dump();
}

std::string stats_json(const TriageStats& s) {
  json j = {{"reviewed_count", s.reviewed_count},
            {"total_count", s.total_count},
            {"confirmed_common_in_reviewed", s.confirmed_common_in_reviewed},
            {"live_precision", nullptr}};
  if (s.live_precision) j["live_precision"] = *s.live_precision;
  return j.dump();
}

std::string instance_json(const TriageService& service, const std::string& id) {
  const Instance* inst = service.dataset().find(id);
  if (!inst) throw NotFound("unknown instance '" + id + "'");
  json annotations = json::array();
  for (const auto& a : inst->annotations)
    annotations.push_back({{"annotator_id", a.annotator_id},
                           {"cuban_variety", a.cuban_variety},
                           {"not_cuban_variety", a.not_cuban_variety},
                           {"specific_variety", a.specific_variety},
                           {"not_able_to_identify", a.not_able_to_identify},
                           {"irrelevant", a.irrelevant}});
  json decisions = json::array();
  for (const auto& d : active_decisions(service.decisions()))
    if (d.instance_id == id)
      decisions.push_back({{"annotator_id", d.annotator_id}, {"decided_label", to_string(d.label)}, {"timestamp", d.timestamp}});
  json scores = json::object();
  for (const auto& [name, ranked] : service.rankings())
    for (std::size_t k = 0; k < ranked.size(); ++k)
      if (ranked.id(k) == id) {
        scores[name] = {{"rank", k + 1}, {"score", ranked.entries[k].score}};
        break;
      }
  json j = {{"id", inst->id},
            {"text", inst->text()},
            {"raw_text", inst->raw_text},
            {"train_label", inst->train_label ? json(inst->train_label->code()) : json(nullptr)},
            {"is_common", inst->is_common},
            {"split", to_string(inst->split)},
            {"current_label", service.current_label(*inst)},
            {"annotations", annotations},
            {"decisions", decisions},
            {"scores", scores},
            {"attribution", tokens_json(service.attribution(*inst))}};
  return j.dump();
}

TriageServer::TriageServer(TriageService& service, std::optional<std::filesystem::path> static_dir)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
  auto& s = *server_;

  s.Get("/api/queue", [this](const httplib::Request& req, httplib::Response& res) {
    const auto scorers = service_.scorers();
    std::string scorer = req.get_param_value("scorer");
    if (scorer.empty() && scorers.size() == 1) scorer = scorers.front();
    if (scorer.empty()) return reply(res, 422, error_json("scorer is required").dump());
    std::size_t limit = 10;
    if (req.has_param("limit")) {
      const auto v = req.get_param_value("limit");
      try {
        std::size_t used = 0;
        const long long n = std::stoll(v, &used);
        if (used != v.size() || n < 1) throw std::invalid_argument(v);
        limit = static_cast<std::size_t>(n);
      } catch (const std::exception&) {
        return reply(res, 422, error_json("limit must be a positive integer").dump());
      }
    }
    std::string annotator = req.get_param_value("annotator");
    if (annotator.empty()) annotator = "anonymous";
    try {
      reply(res, 200, queue_json(service_.next_batch(scorer, limit, annotator)));
    } catch (const NotFound& e) {
      reply(res, 404, error_json(e.what()).dump());
    }
  });

  s.Post("/api/decisions", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      auto d = decision_from_json(req.body, &service_.dataset().labels());
      const auto stored = service_.record_decision(std::move(d));
      reply(res, 201, decision_to_json(stored));
    } catch (const Invalid& e) {
      reply(res, 422, error_json(e.what()).dump());
    } catch (const NotFound& e) {
      reply(res, 404, error_json(e.what()).dump());
    }
  });

  s.Get("/api/stats", [this](const httplib::Request&, httplib::Response& res) {
    reply(res, 200, stats_json(service_.stats()));
  });

  s.Get(R"(/api/instances/(.+))", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      reply(res, 200, instance_json(service_, req.matches[1].str()));
    } catch (const NotFound& e) {
      reply(res, 404, error_json(e.what()).dump());
    }
  });

  s.Get("/api/export", [this](const httplib::Request&, httplib::Response& res) {
    const auto merged = service_.export_merged();
    std::ostringstream out;
    write_generic_csv(out, merged.dataset);
    res.set_header("X-Dropped-Count", std::to_string(merged.dropped.size()));
    res.set_header("X-Unresolved-Count", std::to_string(merged.unresolved.size()));
    reply(res, 200, out.str(), "text/csv; charset=utf-8");
  });

  s.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    reply(res, 500, error_json(what).dump());
  });

  if (static_dir && !s.set_mount_point("/", static_dir->string()))
    throw ConfigError("static directory '" + static_dir->string() + "' does not exist");
}

TriageServer::~TriageServer() = default;

int TriageServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int p = server_->bind_to_any_port(host);
    if (p < 0) throw ConfigError("cannot bind to " + host);
    return p;
  }
  if (!server_->bind_to_port(host, port)) throw ConfigError("cannot bind to " + host + ":" + std::to_string(port));
  return port;
}

void TriageServer::listen() { server_->listen_after_bind(); }

void TriageServer::stop() { server_->stop(); }

}  // namespace varicart
