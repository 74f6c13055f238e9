#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "varicart/triage.hpp"

namespace httplib {
class Server;
}

namespace varicart {

// JSON bodies shared by the HTTP routes and tests.
std::string queue_json(const std::vector<CandidateView>& batch);
std::string stats_json(const TriageStats& s);
std::string instance_json(const TriageService& service, const std::string& id);

// HTTP front end:
//   GET  /api/queue?scorer=&limit=&annotator=
//   POST /api/decisions            201 / 404 / 422
//   GET  /api/stats
//   GET  /api/instances/{id}
//   GET  /api/export               generic_csv
// plus the UI bundle from `static_dir` at "/".
class TriageServer {
 public:
  explicit TriageServer(TriageService& service, std::optional<std::filesystem::path> static_dir = {});
  ~TriageServer();

  // Returns the bound port.
  int bind(const std::string& host, int port);  // port 0 picks a free one
  void listen();                                // blocks until stop()
  void stop();

 private:
  TriageService& service_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace varicart
