#pragma once

// Virtual modifier keys: peak labels attached to the key that produced them,
// resolved against a binding table next to ordinary pass-through typing.

#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "onepress/detector.hpp"
#include "onepress/error.hpp"

namespace onepress {

enum class Modifier { None, MediumRepeat, HardRepeat };

inline std::string_view to_string(Modifier m) {
  switch (m) {
    case Modifier::None: return "none";
    case Modifier::MediumRepeat: return "mediumRepeat";
    case Modifier::HardRepeat: return "hardRepeat";
  }
  return "?";
}

inline std::optional<Modifier> modifier_from_string(std::string_view s) {
  if (s == "none") return Modifier::None;
  if (s == "mediumRepeat") return Modifier::MediumRepeat;
  if (s == "hardRepeat") return Modifier::HardRepeat;
  return std::nullopt;
}

struct ModifiedKeyEvent {
  std::string key;
  Modifier modifier = Modifier::None;
  std::int64_t t_ms = 0;

  friend bool operator==(const ModifiedKeyEvent&, const ModifiedKeyEvent&) = default;
};

/// Chord-producing events only; lifecycle events (releases, mode entry) map
/// to nothing.
inline std::optional<ModifiedKeyEvent> to_modified(const KeyEventRecord& e) {
  switch (e.kind) {
    case EventKind::ClassicalDepress: return ModifiedKeyEvent{e.key, Modifier::None, e.t_ms};
    case EventKind::MediumRepeat: return ModifiedKeyEvent{e.key, Modifier::MediumRepeat, e.t_ms};
    case EventKind::HardRepeat: return ModifiedKeyEvent{e.key, Modifier::HardRepeat, e.t_ms};
    default: return std::nullopt;
  }
}

inline constexpr std::string_view kNoAction = "no-action";

/// Action for an unbound classical key: type it as usual.
inline std::string pass_through_action(std::string_view key) { return "key:" + std::string(key); }

class BindingTable {
 public:
  struct Rule {
    Modifier modifier;
    std::string key;
    std::string action;
  };

  /// Throws DataError on a duplicate (modifier, key).
  void add(Modifier m, std::string key, std::string action) {
    if (!index_.emplace(std::pair{m, key}, rules_.size()).second)
      throw DataError("duplicate binding for [" + std::string(to_string(m)) + "][" + key + "]");
    rules_.push_back({m, std::move(key), std::move(action)});
  }

  const std::vector<Rule>& rules() const { return rules_; }

  std::string resolve(const ModifiedKeyEvent& e) const {
    if (auto it = index_.find({e.modifier, e.key}); it != index_.end()) return rules_[it->second].action;
    if (e.modifier == Modifier::None) return pass_through_action(e.key);
    return std::string(kNoAction);
  }

 private:
  std::vector<Rule> rules_;
  std::map<std::pair<Modifier, std::string>, std::size_t> index_;
};

inline std::string resolve(const ModifiedKeyEvent& e, const BindingTable& table) { return table.resolve(e); }

/// A small table of example chords.
inline BindingTable sample_bindings() {
  BindingTable t;
  t.add(Modifier::HardRepeat, "del", "permanent-delete");
  t.add(Modifier::HardRepeat, "a", "type-uppercase-A");
  t.add(Modifier::HardRepeat, "f4", "close-window");
  t.add(Modifier::MediumRepeat, "tab", "next-window");
  return t;
}

// Binding files hold one rule per line: `<modifier> <key> <action>`, where
// modifier is none|mediumRepeat|hardRepeat. Blank lines and lines starting
// with '#' are skipped.
inline BindingTable read_bindings(std::istream& is) {
  BindingTable t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string mod, key, action, extra;
    if (!(fields >> mod) || mod.front() == '#') continue;
    if (!(fields >> key >> action) || (fields >> extra))
      throw ParseError(line_no, "expected '<modifier> <key> <action>'");
    auto m = modifier_from_string(mod);
    if (!m) throw ParseError(line_no, "unknown modifier '" + mod + "'");
    try {
      t.add(*m, key, action);
    } catch (const DataError& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return t;
}

inline BindingTable read_bindings(const std::string& text) {
  std::istringstream is(text);
  return read_bindings(is);
}

}  // namespace onepress
