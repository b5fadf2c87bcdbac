#ifndef BOTMATCH_SERVICE_HTTP_HPP
#define BOTMATCH_SERVICE_HTTP_HPP

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <string>

#include "botmatch/error.hpp"
#include "botmatch/service.hpp"
#include "httplib.h"

namespace botmatch::service {

/// cpp-httplib front end for a Service. Every GET and POST goes through
/// `Service::handle`; an optional directory is served as static files under
/// /ui/.
class HttpServer {
 public:
  explicit HttpServer(Service& service, const std::filesystem::path& static_dir = {}) : service_(service) {
    auto forward = [this](const httplib::Request& req, httplib::Response& res) {
      Request r;
      r.method = req.method;
      r.path = req.path;
      r.body = req.body;
      for (const auto& [k, v] : req.params) r.query.emplace(k, v);
      for (const auto& [k, v] : req.headers) {
        std::string lower = k;
        std::transform(lower.begin(), lower.end(), lower.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        r.headers.emplace(lower, v);
      }
      const Response out = service_.handle(r);
      res.status = out.status;
      res.set_content(out.text(), out.content_type);
    };
    server_.Get(R"(/.*)", forward);
    server_.Post(R"(/.*)", forward);
    if (!static_dir.empty()) {
      if (!server_.set_mount_point("/ui", static_dir.string())) {
        fail(ErrorKind::io, "static directory '" + static_dir.string() + "' not found");
      }
    }
  }

  /// Binds without serving. Port 0 picks a free port; returns the bound port.
  int bind(const std::string& host, int port) {
    if (port == 0) {
      port = server_.bind_to_any_port(host);
      if (port <= 0) fail(ErrorKind::io, "cannot bind " + host);
    } else if (!server_.bind_to_port(host, port)) {
      fail(ErrorKind::io, "cannot bind " + host + ":" + std::to_string(port) + " (port busy?)");
    }
    return port;
  }

  /// Blocks until `stop`.
  void run() { server_.listen_after_bind(); }
  void stop() { server_.stop(); }
  void wait_until_ready() { server_.wait_until_ready(); }

 private:
  Service& service_;
  httplib::Server server_;
};

}  // namespace botmatch::service

#endif  // BOTMATCH_SERVICE_HTTP_HPP
