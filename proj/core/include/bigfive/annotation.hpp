// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "bigfive/annotation_record.hpp"
#include "bigfive/message.hpp"

namespace bigfive {

enum class TaskStatus { PENDING, ASSIGNED, DONE };
std::string_view to_string(TaskStatus s) noexcept;

struct AnnotationTask {
  std::string message_id;
  std::string text;
  std::optional<std::string> assigned_to;
  TaskStatus status = TaskStatus::PENDING;
};

struct AnnotationServiceOptions {
  // How many distinct annotators each message should receive.
  std::size_t redundancy = 1;
  // When non-empty, only these annotator ids may pull or submit.
  std::set<std::string> annotators;
  std::function<std::chrono::system_clock::time_point()> clock;
};

struct EnqueueResult {
  std::size_t added = 0;
  std::size_t skipped = 0;  // ids already queued
  std::size_t total = 0;    // tasks in the queue afterwards
};

struct Progress {
  std::size_t pending = 0;
  std::size_t assigned = 0;
  std::size_t done = 0;
  std::size_t total = 0;
  std::size_t annotations = 0;
};

/// Hands out annotation tasks and records submissions in an append-only JSONL
/// journal. Each submission is flushed to disk before `submit` returns, and
/// constructing the service replays the journal. All members are safe to call
/// from multiple threads; mutations are serialized.
class AnnotationService {
 public:
  explicit AnnotationService(std::filesystem::path journal, AnnotationServiceOptions options = {});
  ~AnnotationService();
  AnnotationService(const AnnotationService&) = delete;
  AnnotationService& operator=(const AnnotationService&) = delete;

  /// Idempotent per message id.
  EnqueueResult enqueue_tasks(std::span<const LabeledMessage> messages);

  /// Least-annotated task this annotator has neither done nor been handed,
  /// or nullopt when none is left. Throws NotFoundError for an annotator
  /// outside the configured set.
  std::optional<AnnotationTask> next_task(const std::string& annotator_id);

  /// Throws ValidationError (bad ratings), NotFoundError (unknown task or
  /// annotator), ConflictError (duplicate, or task not assigned to them).
  /// Stamps `submitted_at` when empty. Returns the stored record.
  AnnotationRecord submit(AnnotationRecord record);

  /// Sorted by (message_id, annotator_id).
  std::vector<AnnotationRecord> export_annotations() const;
  std::string export_jsonl() const;
  std::string export_csv() const;

  Progress progress() const;
  std::size_t annotation_count(const std::string& message_id) const;
  std::optional<AnnotationTask> task(const std::string& message_id) const;

 private:
  struct TaskState {
    std::string text;
    std::size_t order = 0;
    std::set<std::string> in_flight;
  };

  TaskStatus status_of(const std::string& id, const TaskState& t) const;
  std::size_t done_count(const std::string& id) const;
  void check_annotator(const std::string& annotator_id) const;
  void replay();

  std::filesystem::path journal_path_;
  AnnotationServiceOptions options_;
  mutable std::mutex mu_;
  std::map<std::string, TaskState> tasks_;
  std::vector<AnnotationRecord> records_;
  std::map<std::string, std::set<std::string>> done_by_;  // message -> annotators
  std::FILE* journal_ = nullptr;
};

/// Reads a journal or exported JSONL file of annotation records.
std::vector<AnnotationRecord> load_annotations(const std::filesystem::path& path);

}  // namespace bigfive
