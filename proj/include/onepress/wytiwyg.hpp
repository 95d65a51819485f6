#pragma once

// "What You Touch Is What You Get" menu engine.
//
// One-press entry opens a menu, medium presses cycle the cursor, dwelling on
// an option shows a reduced-contrast preview of its outcome, a hard press on
// an active preview commits, and releasing the key bails out. The engine owns
// no clock: time arrives on the inputs.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "onepress/detector.hpp"
#include "onepress/error.hpp"

namespace onepress {

struct MenuOption {
  std::string id;
  std::string label;
  std::string preview;  // document reference (path or canned blob key)

  friend bool operator==(const MenuOption&, const MenuOption&) = default;
};

struct MenuModel {
  std::string id;
  std::vector<MenuOption> options;

  int size() const { return static_cast<int>(options.size()); }

  /// 1-based, as the cursor is.
  const MenuOption& option(int cursor) const { return options.at(static_cast<std::size_t>(cursor - 1)); }

  void validate() const {
    if (options.empty()) throw DataError("menu '" + id + "': needs at least one option");
    std::set<std::string> seen;
    for (const auto& o : options)
      if (!seen.insert(o.id).second) throw DataError("menu '" + id + "': duplicate option id '" + o.id + "'");
  }

  /// Options "item-1" .. "item-n".
  static MenuModel numbered(int n, std::string id = "numbered") {
    MenuModel m{std::move(id), {}};
    for (int i = 1; i <= n; ++i) {
      auto s = std::to_string(i);
      m.options.push_back({"item-" + s, "Item " + s, "previews/item-" + s + ".html"});
    }
    return m;
  }
};

struct WytiwygConfig {
  std::int64_t dwell_ms = 800;
  double preview_contrast = 0.6;

  void validate() const {
    if (dwell_ms <= 0) throw DataError("wytiwyg config: dwell_ms must be > 0");
    if (!(preview_contrast > 0.0 && preview_contrast <= 1.0))
      throw DataError("wytiwyg config: preview_contrast must be in (0, 1]");
  }
};

enum class EnginePhase { Inactive, MenuOpen, PreviewActive, Committed, Aborted };

inline std::string_view to_string(EnginePhase p) {
  switch (p) {
    case EnginePhase::Inactive: return "Inactive";
    case EnginePhase::MenuOpen: return "MenuOpen";
    case EnginePhase::PreviewActive: return "PreviewActive";
    case EnginePhase::Committed: return "Committed";
    case EnginePhase::Aborted: return "Aborted";
  }
  return "?";
}

struct WytiwygState {
  EnginePhase phase = EnginePhase::Inactive;
  int cursor = 0;  // 0 = nothing selected, else 1..n
  std::int64_t dwell_started_t = 0;
  std::string committed_id;
  int press_count = 0;
  std::int64_t now = 0;

  bool terminal() const { return phase == EnginePhase::Committed || phase == EnginePhase::Aborted; }

  friend bool operator==(const WytiwygState&, const WytiwygState&) = default;
};

enum class InputKind { Enter, Medium, Hard, Release, Tick };

struct EngineInput {
  InputKind kind = InputKind::Tick;
  std::int64_t t_ms = 0;

  friend bool operator==(const EngineInput&, const EngineInput&) = default;
};

/// Peak and mode events drive the engine; classical events do not.
inline std::optional<EngineInput> engine_input(const KeyEventRecord& e) {
  switch (e.kind) {
    case EventKind::OnePressEnter: return EngineInput{InputKind::Enter, e.t_ms};
    case EventKind::MediumRepeat: return EngineInput{InputKind::Medium, e.t_ms};
    case EventKind::HardRepeat: return EngineInput{InputKind::Hard, e.t_ms};
    case EventKind::OnePressRelease: return EngineInput{InputKind::Release, e.t_ms};
    default: return std::nullopt;
  }
}

enum class DirectiveKind { ShowMenu, Highlight, ShowPreview, HidePreview, CommitOutput, InvalidCommit, DismissAll, Warning };

inline std::string_view to_string(DirectiveKind k) {
  switch (k) {
    case DirectiveKind::ShowMenu: return "ShowMenu";
    case DirectiveKind::Highlight: return "Highlight";
    case DirectiveKind::ShowPreview: return "ShowPreview";
    case DirectiveKind::HidePreview: return "HidePreview";
    case DirectiveKind::CommitOutput: return "CommitOutput";
    case DirectiveKind::InvalidCommit: return "InvalidCommit";
    case DirectiveKind::DismissAll: return "DismissAll";
    case DirectiveKind::Warning: return "Warning";
  }
  return "?";
}

inline DirectiveKind directive_kind_from_string(std::string_view s) {
  for (auto k : {DirectiveKind::ShowMenu, DirectiveKind::Highlight, DirectiveKind::ShowPreview,
                 DirectiveKind::HidePreview, DirectiveKind::CommitOutput, DirectiveKind::InvalidCommit,
                 DirectiveKind::DismissAll, DirectiveKind::Warning})
    if (to_string(k) == s) return k;
  throw DataError("unknown directive kind '" + std::string(s) + "'");
}

/// Rendering instruction for the UI. Which fields are meaningful depends on
/// `kind`; see to_json.
struct UiDirective {
  DirectiveKind kind = DirectiveKind::Warning;
  std::int64_t t_ms = 0;
  int cursor = 0;
  std::string option_id;
  std::string label;
  std::string document;
  double contrast = 1.0;
  std::string overlay;  // selected item shown inside the preview
  int menu_size = 0;
  std::string message;

  friend bool operator==(const UiDirective&, const UiDirective&) = default;
};

struct StepResult {
  WytiwygState state;
  std::vector<UiDirective> directives;
};

namespace detail {

inline UiDirective directive(DirectiveKind kind, std::int64_t t) {
  UiDirective d;
  d.kind = kind;
  d.t_ms = t;
  return d;
}

inline UiDirective option_directive(DirectiveKind kind, std::int64_t t, int cursor, const MenuModel& menu) {
  const auto& o = menu.option(cursor);
  UiDirective d = directive(kind, t);
  d.cursor = cursor;
  d.option_id = o.id;
  d.label = o.label;
  if (kind == DirectiveKind::CommitOutput) d.document = o.preview;
  return d;
}

inline UiDirective warning(std::int64_t t, std::string msg) {
  UiDirective d = directive(DirectiveKind::Warning, t);
  d.message = std::move(msg);
  return d;
}

}  // namespace detail

/// One transition. Time never runs backwards: an input older than the state's
/// clock is applied at the clock. Before the input itself is handled, a dwell
/// that has run out promotes the highlighted option to an active preview,
/// stamped at the moment the dwell elapsed.
inline StepResult step(WytiwygState s, const EngineInput& in, const MenuModel& menu, const WytiwygConfig& cfg) {
  std::vector<UiDirective> out;
  const std::int64_t t = std::max(s.now, in.t_ms);
  s.now = t;

  if (s.phase == EnginePhase::MenuOpen && s.cursor >= 1 && t - s.dwell_started_t >= cfg.dwell_ms) {
    s.phase = EnginePhase::PreviewActive;
    auto d = detail::option_directive(DirectiveKind::ShowPreview, s.dwell_started_t + cfg.dwell_ms, s.cursor, menu);
    d.document = menu.option(s.cursor).preview;
    d.contrast = cfg.preview_contrast;
    d.overlay = d.label;
    out.push_back(std::move(d));
  }

  auto advance = [&] {
    s.cursor = s.cursor == 0 ? 1 : s.cursor % menu.size() + 1;
    s.press_count += 1;
    s.dwell_started_t = t;
    s.phase = EnginePhase::MenuOpen;
    out.push_back(detail::option_directive(DirectiveKind::Highlight, t, s.cursor, menu));
  };

  switch (in.kind) {
    case InputKind::Tick:
      break;
    case InputKind::Enter:
      if (s.phase == EnginePhase::MenuOpen || s.phase == EnginePhase::PreviewActive) {
        out.push_back(detail::warning(t, "OnePressEnter while a menu is open"));
        break;
      }
      s.phase = EnginePhase::MenuOpen;
      s.cursor = 0;
      s.press_count = 0;
      s.committed_id.clear();
      s.dwell_started_t = t;
      out.push_back(detail::directive(DirectiveKind::ShowMenu, t));
      out.back().menu_size = menu.size();
      break;
    case InputKind::Medium:
      if (s.phase == EnginePhase::MenuOpen) {
        advance();
      } else if (s.phase == EnginePhase::PreviewActive) {
        out.push_back(detail::directive(DirectiveKind::HidePreview, t));
        advance();
      } else {
        out.push_back(detail::warning(t, "MediumRepeat ignored in " + std::string(to_string(s.phase))));
      }
      break;
    case InputKind::Hard:
      if (s.phase == EnginePhase::PreviewActive) {
        s.phase = EnginePhase::Committed;
        s.committed_id = menu.option(s.cursor).id;
        out.push_back(detail::option_directive(DirectiveKind::CommitOutput, t, s.cursor, menu));
      } else if (s.phase == EnginePhase::MenuOpen) {
        UiDirective d = detail::directive(DirectiveKind::InvalidCommit, t);
        d.cursor = s.cursor;
        out.push_back(std::move(d));
      } else {
        out.push_back(detail::warning(t, "HardRepeat ignored in " + std::string(to_string(s.phase))));
      }
      break;
    case InputKind::Release:
      if (s.phase == EnginePhase::MenuOpen || s.phase == EnginePhase::PreviewActive) {
        s.phase = EnginePhase::Aborted;
        out.push_back(detail::directive(DirectiveKind::DismissAll, t));
      } else if (s.phase != EnginePhase::Committed) {
        // Releasing after a commit just ends the key cycle.
        out.push_back(detail::warning(t, "OnePressRelease ignored in " + std::string(to_string(s.phase))));
      }
      break;
  }
  return {std::move(s), std::move(out)};
}

/// Stateful wrapper: one engine per session.
class WytiwygEngine {
 public:
  WytiwygEngine(MenuModel menu, WytiwygConfig cfg = {}) : menu_(std::move(menu)), cfg_(cfg) {
    menu_.validate();
    cfg_.validate();
  }

  std::vector<UiDirective> on(const EngineInput& in) {
    auto r = step(state_, in, menu_, cfg_);
    state_ = std::move(r.state);
    return std::move(r.directives);
  }

  std::vector<UiDirective> on(const KeyEventRecord& e) {
    if (auto in = engine_input(e)) return on(*in);
    return {};
  }

  const WytiwygState& state() const { return state_; }
  const MenuModel& menu() const { return menu_; }
  const WytiwygConfig& config() const { return cfg_; }

 private:
  MenuModel menu_;
  WytiwygConfig cfg_;
  WytiwygState state_;
};

// ---- serialization -------------------------------------------------------

inline nlohmann::ordered_json to_json(const UiDirective& d) {
  nlohmann::ordered_json j;
  j["type"] = "directive";
  j["kind"] = to_string(d.kind);
  j["t_ms"] = d.t_ms;
  switch (d.kind) {
    case DirectiveKind::ShowMenu:
      j["size"] = d.menu_size;
      break;
    case DirectiveKind::Highlight:
      j["cursor"] = d.cursor;
      j["option"] = d.option_id;
      j["label"] = d.label;
      break;
    case DirectiveKind::ShowPreview:
      j["cursor"] = d.cursor;
      j["option"] = d.option_id;
      j["label"] = d.label;
      j["document"] = d.document;
      j["contrast"] = d.contrast;
      j["overlay"] = d.overlay;
      break;
    case DirectiveKind::CommitOutput:
      j["cursor"] = d.cursor;
      j["option"] = d.option_id;
      j["label"] = d.label;
      j["document"] = d.document;
      break;
    case DirectiveKind::InvalidCommit:
      j["cursor"] = d.cursor;
      break;
    case DirectiveKind::Warning:
      j["message"] = d.message;
      break;
    case DirectiveKind::HidePreview:
    case DirectiveKind::DismissAll:
      break;
  }
  return j;
}

inline UiDirective directive_from_json(const nlohmann::json& j) {
  try {
    UiDirective d;
    d.kind = directive_kind_from_string(j.at("kind").get<std::string>());
    d.t_ms = j.at("t_ms").get<std::int64_t>();
    d.cursor = j.value("cursor", 0);
    d.option_id = j.value("option", std::string());
    d.label = j.value("label", std::string());
    d.document = j.value("document", std::string());
    d.contrast = j.value("contrast", 1.0);
    d.overlay = j.value("overlay", std::string());
    d.menu_size = j.value("size", 0);
    d.message = j.value("message", std::string());
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("directive: ") + e.what());
  }
}

inline nlohmann::ordered_json to_json(const WytiwygState& s) {
  nlohmann::ordered_json j;
  j["type"] = "state";
  j["phase"] = to_string(s.phase);
  j["cursor"] = s.cursor;
  j["press_count"] = s.press_count;
  if (s.phase == EnginePhase::Committed) j["option"] = s.committed_id;
  return j;
}

// Menu fixture documents:
//   {"id": "suggest10", "options": [{"id": ..., "label": ..., "preview": ...}, ...]}

inline MenuModel menu_from_json(const nlohmann::json& doc) {
  MenuModel m;
  try {
    m.id = doc.value("id", std::string("menu"));
    for (const auto& o : doc.at("options"))
      m.options.push_back({o.at("id").get<std::string>(), o.at("label").get<std::string>(),
                           o.value("preview", std::string())});
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("menu fixture: ") + e.what());
  }
  m.validate();
  return m;
}

inline MenuModel read_menu(std::istream& is) {
  try {
    return menu_from_json(nlohmann::json::parse(is));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("menu fixture: ") + e.what());
  }
}

/// Built-in mock query-suggestion list for the search demo.
inline MenuModel suggest10_menu() {
  static const char* const kLabels[] = {
      "croatia boat trip",         "croatia boat trip zadar",   "croatia boat trip snorkeling",
      "croatia island hopping",    "zadar snorkeling",          "zadar boat excursion",
      "croatia sailing holidays",  "zadar kornati national park", "croatia boat trip split",
      "croatia ferry timetable",
  };
  MenuModel m{"suggest10", {}};
  int i = 1;
  for (const char* label : kLabels) {
    auto id = "s" + std::to_string(i++);
    m.options.push_back({id, label, "previews/" + id + ".html"});
  }
  return m;
}

}  // namespace onepress
