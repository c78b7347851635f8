// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "bigfive/annotation.hpp"

namespace bigfive {

/// JSON API over an AnnotationService:
///
///   GET  /api/tasks/next?annotator=ID   200 task | 204 none left
///   POST /api/annotations               201 | 400 | 404 | 409
///   GET  /api/export?format=csv|jsonl   200
///   GET  /api/progress                  200
///
/// Errors carry {"error": message} and, for 400, {"fields": [...]}.
/// `static_dir`, when given, is served at "/".
class AnnotationServer {
 public:
  explicit AnnotationServer(AnnotationService& service,
                            std::optional<std::filesystem::path> static_dir = std::nullopt);
  ~AnnotationServer();
  AnnotationServer(const AnnotationServer&) = delete;
  AnnotationServer& operator=(const AnnotationServer&) = delete;

  /// Port 0 picks an ephemeral port. Returns the bound port.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  void run();
  /// run() on a background thread.
  void start();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace bigfive
