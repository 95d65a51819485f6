#pragma once

// Target-task trials: replay each depress/release cycle through a fresh menu
// engine, classify it as a success or one of four failure categories, and
// summarize.

#include <algorithm>
#include <array>
#include <cstdint>
#include <iomanip>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "onepress/detector.hpp"
#include "onepress/error.hpp"
#include "onepress/event_io.hpp"
#include "onepress/wytiwyg.hpp"

namespace onepress {

enum class TaskGoal { Navigate, Preview, Commit };

struct TaskSpec {
  std::string id = "stage4";
  int menu_size = 10;
  int target = 8;
  int attempts = 10;
  TaskGoal goal = TaskGoal::Commit;

  void validate() const {
    if (menu_size < 1) throw DataError("task: menu_size must be >= 1");
    if (target < 1 || target > menu_size) throw DataError("task: target must be in [1, menu_size]");
    if (attempts < 1) throw DataError("task: attempts must be >= 1");
  }
};

/// Practice stages: navigate; navigate and hold for the preview; navigate,
/// preview and commit; and the fixed-target task (item 8 of 10).
inline TaskSpec task_preset(std::string_view name) {
  if (name == "stage1") return {"stage1", 10, 5, 10, TaskGoal::Navigate};
  if (name == "stage2") return {"stage2", 10, 5, 10, TaskGoal::Preview};
  if (name == "stage3") return {"stage3", 10, 5, 10, TaskGoal::Commit};
  if (name == "stage4") return {"stage4", 10, 8, 10, TaskGoal::Commit};
  throw DataError("unknown task preset '" + std::string(name) + "' (stage1..stage4)");
}

enum class FailureCategory { UnintendedRelease, HardAsMediumMixup, MediumAsHardMixup, Other };
inline constexpr std::array kFailureCategories = {FailureCategory::UnintendedRelease, FailureCategory::HardAsMediumMixup,
                                                  FailureCategory::MediumAsHardMixup, FailureCategory::Other};

inline std::string_view to_string(FailureCategory c) {
  switch (c) {
    case FailureCategory::UnintendedRelease: return "UnintendedRelease";
    case FailureCategory::HardAsMediumMixup: return "HardAsMediumMixup";
    case FailureCategory::MediumAsHardMixup: return "MediumAsHardMixup";
    case FailureCategory::Other: return "Other";
  }
  return "?";
}

inline FailureCategory failure_category_from_string(std::string_view s) {
  for (auto c : kFailureCategories)
    if (to_string(c) == s) return c;
  throw DataError("unknown failure category '" + std::string(s) + "'");
}

using TranscriptEntry = std::variant<KeyEventRecord, UiDirective>;
using Transcript = std::vector<TranscriptEntry>;

inline std::int64_t entry_time(const TranscriptEntry& e) {
  return std::visit([](const auto& x) { return x.t_ms; }, e);
}

struct AttemptOutcome {
  std::optional<FailureCategory> failure;  // nullopt = success
  Transcript transcript;
  std::int64_t duration_ms = 0;

  bool success() const { return !failure; }
};

/// Feeds one cycle's events through a fresh engine. Directives follow the
/// event that caused them; a preview that became due before an event is
/// listed ahead of it.
inline Transcript run_attempt(const std::vector<KeyEventRecord>& cycle, const MenuModel& menu,
                              const WytiwygConfig& cfg = {}) {
  WytiwygEngine engine(menu, cfg);
  Transcript t;
  for (const auto& e : cycle) {
    for (auto& d : engine.on(EngineInput{InputKind::Tick, e.t_ms})) t.emplace_back(std::move(d));
    t.emplace_back(e);
    for (auto& d : engine.on(e)) t.emplace_back(std::move(d));
  }
  return t;
}

/// Success means reaching the task's goal on the target option: highlighting
/// it, activating its preview, or committing it from its preview.
///
/// Failures, first match wins:
///  1. HardAsMediumMixup: a hard press fired before any preview (InvalidCommit).
///  2. MediumAsHardMixup: the target's preview was active and a medium press
///     dismissed it (a press meant as hard registered as medium).
///  3. UnintendedRelease: the cycle was released without commit, including
///     cycles that never entered one-press mode (quick aborted presses).
///  4. Other: anything else, e.g. committing the wrong option.
///
/// Throws DataError for a one-press cycle with no terminal directive.
inline AttemptOutcome classify_attempt(Transcript transcript, const TaskSpec& task) {
  AttemptOutcome out;
  if (!transcript.empty())
    out.duration_ms = entry_time(transcript.back()) - entry_time(transcript.front());

  bool entered = false, terminal = false, aborted = false;
  bool highlighted = false, previewed = false, committed = false;
  bool invalid_commit = false, medium_over_target = false;
  int preview_cursor = 0;
  for (const auto& entry : transcript) {
    const auto* d = std::get_if<UiDirective>(&entry);
    if (!d) continue;
    switch (d->kind) {
      case DirectiveKind::ShowMenu: entered = true; break;
      case DirectiveKind::Highlight: highlighted |= d->cursor == task.target; break;
      case DirectiveKind::ShowPreview:
        preview_cursor = d->cursor;
        previewed |= d->cursor == task.target;
        break;
      case DirectiveKind::HidePreview:
        medium_over_target |= preview_cursor == task.target;
        preview_cursor = 0;
        break;
      case DirectiveKind::CommitOutput:
        terminal = true;
        committed |= d->cursor == task.target && preview_cursor == task.target;
        break;
      case DirectiveKind::DismissAll:
        terminal = aborted = true;
        break;
      case DirectiveKind::InvalidCommit: invalid_commit = true; break;
      case DirectiveKind::Warning: break;
    }
  }

  if (!entered) {
    out.failure = FailureCategory::UnintendedRelease;
    out.transcript = std::move(transcript);
    return out;
  }
  if (!terminal) throw DataError("incomplete transcript: missing terminal CommitOutput or DismissAll");

  bool ok = false;
  switch (task.goal) {
    case TaskGoal::Navigate: ok = highlighted; break;
    case TaskGoal::Preview: ok = previewed; break;
    case TaskGoal::Commit: ok = committed; break;
  }
  if (!ok) {
    if (invalid_commit) out.failure = FailureCategory::HardAsMediumMixup;
    else if (medium_over_target) out.failure = FailureCategory::MediumAsHardMixup;
    else if (aborted) out.failure = FailureCategory::UnintendedRelease;
    else out.failure = FailureCategory::Other;
  }
  out.transcript = std::move(transcript);
  return out;
}

/// Splits an event stream into depress/release cycles: OnePressEnter ..
/// OnePressRelease or ClassicalDepress .. ClassicalRelease, per key, ordered
/// by cycle start. A cycle still open at the end is returned as is.
inline std::vector<std::vector<KeyEventRecord>> split_cycles(const std::vector<KeyEventRecord>& events) {
  std::vector<std::vector<KeyEventRecord>> cycles;
  std::map<std::string, std::size_t> open;
  for (const auto& e : events) {
    auto it = open.find(e.key);
    const bool starts = e.kind == EventKind::OnePressEnter || e.kind == EventKind::ClassicalDepress;
    if (starts) {
      if (it != open.end())
        throw DataError("event at t_ms " + std::to_string(e.t_ms) + " starts a cycle on '" + e.key +
                        "' while one is open");
      open[e.key] = cycles.size();
      cycles.push_back({e});
      continue;
    }
    if (it == open.end())
      throw DataError("event " + std::string(to_string(e.kind)) + " at t_ms " + std::to_string(e.t_ms) +
                      " outside a depress cycle on '" + e.key + "'");
    cycles[it->second].push_back(e);
    if (e.kind == EventKind::OnePressRelease || e.kind == EventKind::ClassicalRelease) open.erase(it);
  }
  return cycles;
}

struct TrialLog {
  TaskSpec task;
  std::vector<AttemptOutcome> attempts;

  int score() const {
    return static_cast<int>(std::count_if(attempts.begin(), attempts.end(), [](const auto& a) { return a.success(); }));
  }
  int failures() const { return static_cast<int>(attempts.size()) - score(); }
  int count(FailureCategory c) const {
    return static_cast<int>(
        std::count_if(attempts.begin(), attempts.end(), [c](const auto& a) { return a.failure == c; }));
  }
};

/// Classifies the first `task.attempts` cycles; later ones are ignored.
inline TrialLog run_trial(const TaskSpec& task, const std::vector<std::vector<KeyEventRecord>>& cycles,
                          const WytiwygConfig& cfg = {}) {
  task.validate();
  if (cycles.size() < static_cast<std::size_t>(task.attempts))
    throw DataError("trial needs " + std::to_string(task.attempts) + " attempts, got " +
                    std::to_string(cycles.size()));
  const auto menu = MenuModel::numbered(task.menu_size);
  TrialLog log{task, {}};
  for (int i = 0; i < task.attempts; ++i)
    log.attempts.push_back(classify_attempt(run_attempt(cycles[static_cast<std::size_t>(i)], menu, cfg), task));
  return log;
}

struct TrialSummary {
  int attempts = 0;
  int score = 0;
  int failures = 0;
  std::array<int, 4> histogram{};  // indexed like kFailureCategories
  std::vector<std::int64_t> durations_ms;  // ascending
  double mean_duration_ms = 0.0;

  int count(FailureCategory c) const { return histogram[static_cast<std::size_t>(c)]; }
};

inline TrialSummary summarize(const TrialLog& log) {
  TrialSummary s;
  s.attempts = static_cast<int>(log.attempts.size());
  for (const auto& a : log.attempts) {
    if (a.failure) ++s.histogram[static_cast<std::size_t>(*a.failure)];
    else ++s.score;
    s.durations_ms.push_back(a.duration_ms);
  }
  s.failures = s.attempts - s.score;
  std::sort(s.durations_ms.begin(), s.durations_ms.end());
  if (!s.durations_ms.empty())
    s.mean_duration_ms = static_cast<double>(std::accumulate(s.durations_ms.begin(), s.durations_ms.end(),
                                                             std::int64_t{0})) /
                         static_cast<double>(s.durations_ms.size());
  return s;
}

/// Pools several summaries (e.g. one per subject).
inline TrialSummary combine(const std::vector<TrialSummary>& parts) {
  TrialSummary s;
  for (const auto& p : parts) {
    s.attempts += p.attempts;
    s.score += p.score;
    s.failures += p.failures;
    for (std::size_t i = 0; i < s.histogram.size(); ++i) s.histogram[i] += p.histogram[i];
    s.durations_ms.insert(s.durations_ms.end(), p.durations_ms.begin(), p.durations_ms.end());
  }
  std::sort(s.durations_ms.begin(), s.durations_ms.end());
  if (!s.durations_ms.empty())
    s.mean_duration_ms = static_cast<double>(std::accumulate(s.durations_ms.begin(), s.durations_ms.end(),
                                                             std::int64_t{0})) /
                         static_cast<double>(s.durations_ms.size());
  return s;
}

// ---- serialization -------------------------------------------------------

inline nlohmann::ordered_json to_json(const TranscriptEntry& e) {
  if (const auto* ev = std::get_if<KeyEventRecord>(&e)) return to_tagged_json(*ev);
  return to_json(std::get<UiDirective>(e));
}

inline TranscriptEntry transcript_entry_from_json(const nlohmann::json& j) {
  const auto type = j.value("type", std::string());
  if (type == "event") return event_from_json(j);
  if (type == "directive") return directive_from_json(j);
  throw DataError("transcript entry: unknown type '" + type + "'");
}

/// One trial-log line: task id, attempt number, outcome, category, duration
/// and the full transcript.
inline nlohmann::ordered_json to_json(const AttemptOutcome& a, const TaskSpec& task, int attempt_no,
                                     const std::string& session = {}) {
  nlohmann::ordered_json j;
  if (!session.empty()) j["session"] = session;
  j["task"] = task.id;
  j["attempt"] = attempt_no;
  j["outcome"] = a.success() ? "success" : "failure";
  if (a.failure) j["category"] = to_string(*a.failure);
  j["duration_ms"] = a.duration_ms;
  auto& tr = j["transcript"] = nlohmann::ordered_json::array();
  for (const auto& e : a.transcript) tr.push_back(to_json(e));
  return j;
}

inline void write_trial_log(std::ostream& os, const TrialLog& log, const std::string& session = {}) {
  for (std::size_t i = 0; i < log.attempts.size(); ++i)
    os << to_json(log.attempts[i], log.task, static_cast<int>(i) + 1, session).dump() << '\n';
}

inline nlohmann::ordered_json to_json(const TrialSummary& s) {
  nlohmann::ordered_json j;
  j["attempts"] = s.attempts;
  j["score"] = s.score;
  j["failures"] = s.failures;
  auto& h = j["categories"] = nlohmann::ordered_json::object();
  for (auto c : kFailureCategories) h[std::string(to_string(c))] = s.count(c);
  j["mean_duration_ms"] = s.mean_duration_ms;
  j["durations_ms"] = s.durations_ms;
  return j;
}

/// Fixed-column text table, one row per labelled summary.
inline void print_summary_table(std::ostream& os, const std::vector<std::pair<std::string, TrialSummary>>& rows) {
  os << std::left << std::setw(24) << "session" << std::right << std::setw(9) << "attempts" << std::setw(7) << "score"
     << std::setw(10) << "failures" << std::setw(19) << "UnintendedRelease" << std::setw(19) << "HardAsMediumMixup"
     << std::setw(19) << "MediumAsHardMixup" << std::setw(7) << "Other" << std::setw(14) << "mean_ms" << '\n';
  for (const auto& [name, s] : rows) {
    std::ostringstream mean;
    mean << std::fixed << std::setprecision(1) << s.mean_duration_ms;
    os << std::left << std::setw(24) << name << std::right << std::setw(9) << s.attempts << std::setw(7) << s.score
       << std::setw(10) << s.failures << std::setw(19) << s.count(FailureCategory::UnintendedRelease) << std::setw(19)
       << s.count(FailureCategory::HardAsMediumMixup) << std::setw(19)
       << s.count(FailureCategory::MediumAsHardMixup) << std::setw(7) << s.count(FailureCategory::Other)
       << std::setw(14) << mean.str() << '\n';
  }
}

}  // namespace onepress
