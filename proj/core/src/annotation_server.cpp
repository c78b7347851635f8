// SPDX-License-Identifier: Apache-2.0

#include "bigfive/annotation_server.hpp"

#include <httplib.h>

#include <json.hpp>
#include <thread>

#include "bigfive/error.hpp"

namespace bigfive {

namespace {

using json = nlohmann::ordered_json;

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, status, json{{"error", message}});
}

}  // namespace

struct AnnotationServer::Impl {
  AnnotationService& service;
  httplib::Server http;
  std::jthread worker;
  bool bound = false;

  explicit Impl(AnnotationService& s) : service(s) {}
};

AnnotationServer::AnnotationServer(AnnotationService& service,
                                   std::optional<std::filesystem::path> static_dir)
    : impl_(std::make_unique<Impl>(service)) {
  auto& http = impl_->http;
  auto& svc = impl_->service;

  http.Get("/api/tasks/next", [&svc](const httplib::Request& req, httplib::Response& res) {
    const std::string annotator = req.get_param_value("annotator");
    if (annotator.empty()) {
      send_json(res, 400, json{{"error", "missing 'annotator' parameter"},
                               {"fields", json::array({"annotator"})}});
      return;
    }
    try {
      auto task = svc.next_task(annotator);
      if (!task) {
        res.status = 204;
        return;
      }
      send_json(res, 200, json{{"message_id", task->message_id},
                               {"text", task->text},
                               {"assigned_to", annotator},
                               {"status", to_string(task->status)}});
    } catch (const NotFoundError& e) {
      send_error(res, 403, e.what());
    }
  });

  http.Post("/api/annotations", [&svc](const httplib::Request& req, httplib::Response& res) {
    try {
      auto stored = svc.submit(annotation_from_json(req.body));
      send_json(res, 201, json::parse(to_json_line(stored)));
    } catch (const ValidationError& e) {
      send_json(res, 400, json{{"error", e.what()}, {"fields", e.fields()}});
    } catch (const NotFoundError& e) {
      send_error(res, 404, e.what());
    } catch (const ConflictError& e) {
      send_error(res, 409, e.what());
    }
  });

  http.Get("/api/export", [&svc](const httplib::Request& req, httplib::Response& res) {
    const std::string format =
        req.has_param("format") ? req.get_param_value("format") : std::string("jsonl");
    if (format == "csv") {
      res.set_content(svc.export_csv(), "text/csv");
    } else if (format == "jsonl") {
      res.set_content(svc.export_jsonl(), "application/x-ndjson");
    } else {
      send_json(res, 400, json{{"error", "format must be csv or jsonl"},
                               {"fields", json::array({"format"})}});
    }
  });

  http.Get("/api/progress", [&svc](const httplib::Request&, httplib::Response& res) {
    const Progress p = svc.progress();
    send_json(res, 200, json{{"pending", p.pending},
                             {"assigned", p.assigned},
                             {"done", p.done},
                             {"total", p.total},
                             {"annotations", p.annotations}});
  });

  http.set_exception_handler(
      [](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        try {
          std::rethrow_exception(ep);
        } catch (const std::exception& e) {
          send_error(res, 500, e.what());
        } catch (...) {
          send_error(res, 500, "internal error");
        }
      });

  if (static_dir) {
    if (!http.set_mount_point("/", static_dir->string())) {
      throw ConfigError("static directory not found: " + static_dir->string());
    }
  }
}

AnnotationServer::~AnnotationServer() { stop(); }

int AnnotationServer::bind(const std::string& host, int port) {
  int bound = port == 0 ? impl_->http.bind_to_any_port(host) : port;
  if (port != 0 && !impl_->http.bind_to_port(host, port)) bound = -1;
  if (bound < 0) throw Error("cannot bind " + host + ":" + std::to_string(port));
  impl_->bound = true;
  return bound;
}

void AnnotationServer::run() {
  if (!impl_->bound) throw ContractViolation("bind() before run()");
  impl_->http.listen_after_bind();
}

void AnnotationServer::start() {
  if (!impl_->bound) throw ContractViolation("bind() before start()");
  impl_->worker = std::jthread([this] { impl_->http.listen_after_bind(); });
  impl_->http.wait_until_ready();
}

void AnnotationServer::stop() {
  if (!impl_) return;
  impl_->http.stop();
  if (impl_->worker.joinable()) impl_->worker.join();
}

}  // namespace bigfive
