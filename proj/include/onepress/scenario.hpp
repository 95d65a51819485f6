#pragma once

// Press scripts for scripted users of the menu task, used to synthesize
// sessions for trials, fixtures and end-to-end checks.

#include <cstdint>
#include <random>
#include <string_view>

#include "onepress/signal_model.hpp"

namespace onepress {

/// What a scripted user does during one depress/release cycle.
enum class Behavior {
  Perfect,               // navigate to the target, dwell, hard press
  QuickTap,              // short soft tap that never reaches one-press mode
  EarlyRelease,          // navigate and dwell, then let go instead of pressing hard
  HardDuringNavigation,  // one navigation press comes out hard, then let go
  MediumInsteadOfHard,   // the final press comes out medium, moving off the target
  WrongOption,           // commits the option before the target
};

inline std::string_view to_string(Behavior b) {
  switch (b) {
    case Behavior::Perfect: return "perfect";
    case Behavior::QuickTap: return "quick-tap";
    case Behavior::EarlyRelease: return "early-release";
    case Behavior::HardDuringNavigation: return "hard-during-navigation";
    case Behavior::MediumInsteadOfHard: return "medium-instead-of-hard";
    case Behavior::WrongOption: return "wrong-option";
  }
  return "?";
}

/// Timing and force of one scripted attempt. The defaults suit the default
/// detector (500 ms hold timeout) and engine (800 ms dwell).
struct PressStyle {
  std::int64_t hold_ms = 700;         // soft hold before the first press
  double base_n = 0.8;                // soft-hold force
  std::int64_t press_gap_ms = 350;    // one press segment (apex 100 ms in)
  double medium_apex_n = 1.6;
  double hard_apex_n = 2.5;
  std::int64_t dwell_wait_ms = 1100;  // pause on the target before committing
  std::int64_t tail_ms = 300;         // hold after the last press
  std::int64_t rest_ms = 800;         // key up before the next attempt

  /// Seeded variation around the defaults that stays inside the detector's
  /// bands and keeps the dwell satisfied.
  template <typename Rng>
  static PressStyle jittered(Rng& rng) {
    auto u = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    auto span = [&](std::int64_t lo, std::int64_t hi) {
      return lo + static_cast<std::int64_t>(u() * static_cast<double>(hi - lo + 1));
    };
    PressStyle s;
    s.hold_ms = span(650, 850);
    s.base_n = 0.75 + 0.15 * u();
    s.press_gap_ms = span(300, 420);
    s.medium_apex_n = 1.45 + 0.3 * u();
    s.hard_apex_n = 2.3 + 0.4 * u();
    s.dwell_wait_ms = span(900, 1200);
    s.tail_ms = span(200, 400);
    s.rest_ms = span(600, 1000);
    return s;
  }
};

/// Appends one attempt aimed at menu option `target` (1-based).
inline void append_attempt(PressScript& script, Behavior b, int target, const PressStyle& s = {}) {
  auto medium = [&] { script.then(Segment::peak(s.press_gap_ms, s.medium_apex_n)); };
  auto hard = [&] { script.then(Segment::peak(s.press_gap_ms, s.hard_apex_n)); };
  auto hold = [&](std::int64_t ms) { script.then(Segment::soft_hold(ms, s.base_n)); };

  if (b == Behavior::QuickTap) {
    hold(200);
    script.then(Segment::idle(s.rest_ms));
    return;
  }
  hold(s.hold_ms);
  switch (b) {
    case Behavior::Perfect:
      for (int i = 0; i < target; ++i) medium();
      hold(s.dwell_wait_ms);
      hard();
      break;
    case Behavior::EarlyRelease:
      for (int i = 0; i < target; ++i) medium();
      hold(s.dwell_wait_ms);
      break;
    case Behavior::HardDuringNavigation:
      for (int i = 0; i < target / 2; ++i) medium();
      hard();
      break;
    case Behavior::MediumInsteadOfHard:
      for (int i = 0; i < target; ++i) medium();
      hold(s.dwell_wait_ms);
      medium();
      break;
    case Behavior::WrongOption:
      for (int i = 0; i < target - 1; ++i) medium();
      hold(s.dwell_wait_ms);
      hard();
      break;
    case Behavior::QuickTap:
      break;
  }
  hold(s.tail_ms);
  script.then(Segment::idle(s.rest_ms));
}

}  // namespace onepress
