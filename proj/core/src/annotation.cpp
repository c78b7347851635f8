// SPDX-License-Identifier: Apache-2.0

#include "bigfive/annotation.hpp"

#include <algorithm>
#include <tuple>
#include <unistd.h>

#include "bigfive/error.hpp"
#include "text_util.hpp"

namespace bigfive {

std::string_view to_string(TaskStatus s) noexcept {
  switch (s) {
    case TaskStatus::PENDING: return "PENDING";
    case TaskStatus::ASSIGNED: return "ASSIGNED";
    case TaskStatus::DONE: return "DONE";
  }
  return "?";
}

namespace {

std::vector<AnnotationRecord> parse_journal(std::string_view raw, const std::string& name) {
  std::vector<AnnotationRecord> out;
  const auto lines = detail::split_lines(raw);
  const bool ends_clean = raw.empty() || raw.back() == '\n';
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (detail::trim(lines[i]).empty()) continue;
    try {
      out.push_back(annotation_from_json(lines[i]));
    } catch (const ValidationError& e) {
      // A torn final write (no trailing newline) is dropped, not fatal.
      if (i + 1 == lines.size() && !ends_clean) break;
      throw ParseError(name + ": " + e.what(), i + 1);
    }
  }
  return out;
}

}  // namespace

std::vector<AnnotationRecord> load_annotations(const std::filesystem::path& path) {
  return parse_journal(detail::read_file(path), path.string());
}

AnnotationService::AnnotationService(std::filesystem::path journal,
                                     AnnotationServiceOptions options)
    : journal_path_(std::move(journal)), options_(std::move(options)) {
  if (options_.redundancy < 1) throw ContractViolation("redundancy must be >= 1");
  replay();
  journal_ = std::fopen(journal_path_.c_str(), "ab");
  if (!journal_) throw Error("cannot open journal " + journal_path_.string());
}

AnnotationService::~AnnotationService() {
  if (journal_) std::fclose(journal_);
}

void AnnotationService::replay() {
  if (!std::filesystem::exists(journal_path_)) return;
  std::string raw = detail::read_file(journal_path_);
  if (!raw.empty() && raw.back() != '\n') {
    // Drop a torn tail so the next append starts on a fresh line.
    const auto last_nl = raw.rfind('\n');
    raw.resize(last_nl == std::string::npos ? 0 : last_nl + 1);
    detail::write_file_atomic(journal_path_, raw);
  }
  for (auto& r : parse_journal(raw, journal_path_.string())) {
    if (!done_by_[r.message_id].insert(r.annotator_id).second) continue;
    records_.push_back(std::move(r));
  }
}

void AnnotationService::check_annotator(const std::string& annotator_id) const {
  if (annotator_id.empty()) throw ValidationError("annotator id is required", {"annotator_id"});
  if (!options_.annotators.empty() && !options_.annotators.contains(annotator_id)) {
    throw NotFoundError("annotator '" + annotator_id + "' is not registered");
  }
}

std::size_t AnnotationService::done_count(const std::string& id) const {
  auto it = done_by_.find(id);
  return it == done_by_.end() ? 0 : it->second.size();
}

TaskStatus AnnotationService::status_of(const std::string& id, const TaskState& t) const {
  if (done_count(id) >= options_.redundancy) return TaskStatus::DONE;
  if (!t.in_flight.empty()) return TaskStatus::ASSIGNED;
  return TaskStatus::PENDING;
}

EnqueueResult AnnotationService::enqueue_tasks(std::span<const LabeledMessage> messages) {
  std::lock_guard lock(mu_);
  EnqueueResult result;
  for (const auto& m : messages) {
    if (tasks_.contains(m.id)) {
      ++result.skipped;
      continue;
    }
    tasks_.emplace(m.id, TaskState{m.text, tasks_.size(), {}});
    ++result.added;
  }
  result.total = tasks_.size();
  return result;
}

std::optional<AnnotationTask> AnnotationService::next_task(const std::string& annotator_id) {
  check_annotator(annotator_id);
  std::lock_guard lock(mu_);
  const std::string* best_id = nullptr;
  TaskState* best = nullptr;
  std::size_t best_load = 0;
  for (auto& [id, t] : tasks_) {
    const std::size_t load = done_count(id) + t.in_flight.size();
    if (load >= options_.redundancy) continue;
    if (t.in_flight.contains(annotator_id)) continue;
    if (auto it = done_by_.find(id); it != done_by_.end() && it->second.contains(annotator_id)) {
      continue;
    }
    if (!best || load < best_load || (load == best_load && t.order < best->order)) {
      best_id = &id;
      best = &t;
      best_load = load;
    }
  }
  if (!best) return std::nullopt;
  best->in_flight.insert(annotator_id);
  return AnnotationTask{*best_id, best->text, annotator_id, status_of(*best_id, *best)};
}

AnnotationRecord AnnotationService::submit(AnnotationRecord record) {
  validate(record);
  check_annotator(record.annotator_id);
  std::lock_guard lock(mu_);
  auto it = tasks_.find(record.message_id);
  if (it == tasks_.end()) throw NotFoundError("unknown task '" + record.message_id + "'");
  if (done_by_[record.message_id].contains(record.annotator_id)) {
    throw ConflictError("annotator '" + record.annotator_id + "' already annotated '" +
                        record.message_id + "'");
  }
  if (!it->second.in_flight.contains(record.annotator_id)) {
    throw ConflictError("task '" + record.message_id + "' is not assigned to '" +
                        record.annotator_id + "'");
  }
  if (record.submitted_at.empty()) {
    record.submitted_at = detail::iso8601_utc(options_.clock ? options_.clock()
                                                             : std::chrono::system_clock::now());
  }

  const std::string line = to_json_line(record) + "\n";
  if (std::fwrite(line.data(), 1, line.size(), journal_) != line.size() ||
      std::fflush(journal_) != 0 || ::fsync(::fileno(journal_)) != 0) {
    throw Error("failed to append to journal " + journal_path_.string());
  }
  it->second.in_flight.erase(record.annotator_id);
  done_by_[record.message_id].insert(record.annotator_id);
  records_.push_back(record);
  return record;
}

std::vector<AnnotationRecord> AnnotationService::export_annotations() const {
  std::lock_guard lock(mu_);
  std::vector<AnnotationRecord> out = records_;
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::tie(a.message_id, a.annotator_id) < std::tie(b.message_id, b.annotator_id);
  });
  return out;
}

std::string AnnotationService::export_jsonl() const {
  std::string out;
  for (const auto& r : export_annotations()) out += to_json_line(r) + "\n";
  return out;
}

std::string AnnotationService::export_csv() const {
  std::string out = "message_id,annotator_id";
  for (auto t : kAllTraits) out += ",rating_" + std::string(to_string(t));
  for (auto t : kAllTraits) out += ",difficulty_" + std::string(to_string(t));
  out += ",submitted_at\n";
  for (const auto& r : export_annotations()) {
    out += detail::csv_field(r.message_id) + "," + detail::csv_field(r.annotator_id);
    for (auto t : kAllTraits) out += "," + std::to_string(r.ratings[t]);
    for (auto t : kAllTraits) out += "," + std::to_string(r.difficulty[t]);
    out += "," + detail::csv_field(r.submitted_at) + "\n";
  }
  return out;
}

Progress AnnotationService::progress() const {
  std::lock_guard lock(mu_);
  Progress p;
  p.total = tasks_.size();
  p.annotations = records_.size();
  for (const auto& [id, t] : tasks_) {
    switch (status_of(id, t)) {
      case TaskStatus::PENDING: ++p.pending; break;
      case TaskStatus::ASSIGNED: ++p.assigned; break;
      case TaskStatus::DONE: ++p.done; break;
    }
  }
  return p;
}

std::size_t AnnotationService::annotation_count(const std::string& message_id) const {
  std::lock_guard lock(mu_);
  return done_count(message_id);
}

std::optional<AnnotationTask> AnnotationService::task(const std::string& message_id) const {
  std::lock_guard lock(mu_);
  auto it = tasks_.find(message_id);
  if (it == tasks_.end()) return std::nullopt;
  AnnotationTask t{message_id, it->second.text, std::nullopt, status_of(message_id, it->second)};
  if (!it->second.in_flight.empty()) t.assigned_to = *it->second.in_flight.begin();
  return t;
}

}  // namespace bigfive
