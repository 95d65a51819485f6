#pragma once

// Per-key one-press detector.
//
// Classical depress/release pairs are recreated for firm strikes and quick
// taps. A soft hold that outlasts the timeout suppresses the classical
// depress and enters one-press mode, where pressing movements on the held key
// are found from the first-order derivative of the smoothed force and
// labelled medium or hard by their apex.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "onepress/error.hpp"
#include "onepress/signal_model.hpp"

namespace onepress {

struct DetectorConfig {
  double usable_floor_n = 0.6;
  double usable_ceiling_n = 3.0;
  double soft_band_max_n = 1.2;
  std::int64_t hold_timeout_ms = 500;
  int smooth_window_samples = 3;
  double onset_slope_n_per_s = 4.0;
  double medium_min_apex_n = 1.2;
  double hard_min_apex_n = 2.0;
  std::int64_t refractory_ms = 120;
  double release_floor_n = 0.1;

  void validate() const {
    if (!(usable_floor_n < soft_band_max_n && soft_band_max_n <= medium_min_apex_n &&
          medium_min_apex_n < hard_min_apex_n && hard_min_apex_n <= usable_ceiling_n))
      throw DataError(
          "detector config: require usable_floor_n < soft_band_max_n <= medium_min_apex_n < "
          "hard_min_apex_n <= usable_ceiling_n");
    if (hold_timeout_ms <= 0) throw DataError("detector config: hold_timeout_ms must be > 0");
    if (refractory_ms < 0) throw DataError("detector config: refractory_ms must be >= 0");
    if (smooth_window_samples < 1)
      throw DataError("detector config: smooth_window_samples must be >= 1");
    if (!(release_floor_n < usable_floor_n))
      throw DataError("detector config: release_floor_n must be < usable_floor_n");
    if (!(onset_slope_n_per_s > 0.0))
      throw DataError("detector config: onset_slope_n_per_s must be > 0");
  }

  friend bool operator==(const DetectorConfig&, const DetectorConfig&) = default;
};

enum class EventKind { ClassicalDepress, ClassicalRelease, OnePressEnter, MediumRepeat, HardRepeat, OnePressRelease };

inline std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::ClassicalDepress: return "ClassicalDepress";
    case EventKind::ClassicalRelease: return "ClassicalRelease";
    case EventKind::OnePressEnter: return "OnePressEnter";
    case EventKind::MediumRepeat: return "MediumRepeat";
    case EventKind::HardRepeat: return "HardRepeat";
    case EventKind::OnePressRelease: return "OnePressRelease";
  }
  return "?";
}

inline EventKind event_kind_from_string(std::string_view s) {
  for (auto k : {EventKind::ClassicalDepress, EventKind::ClassicalRelease, EventKind::OnePressEnter,
                 EventKind::MediumRepeat, EventKind::HardRepeat, EventKind::OnePressRelease})
    if (to_string(k) == s) return k;
  throw DataError("unknown event kind '" + std::string(s) + "'");
}

struct KeyEventRecord {
  std::int64_t t_ms = 0;
  std::string key;
  EventKind kind = EventKind::ClassicalDepress;
  std::optional<double> apex_n;  // MediumRepeat / HardRepeat only

  bool is_peak() const { return kind == EventKind::MediumRepeat || kind == EventKind::HardRepeat; }

  friend bool operator==(const KeyEventRecord&, const KeyEventRecord&) = default;
};

enum class ApexClass { None, Medium, Hard };

/// Amplitude-band classification of a peak apex. Total and monotone in apex.
inline ApexClass classify_apex(double apex_n, const DetectorConfig& cfg) {
  if (apex_n >= cfg.hard_min_apex_n) return ApexClass::Hard;
  if (apex_n >= cfg.medium_min_apex_n) return ApexClass::Medium;
  return ApexClass::None;
}

enum class Phase { Idle, Contact, ClassicalDown, OnePress };
enum class OnePressPhase { Baseline, PeakCandidate, Refractory };

/// Thrown for a sample whose t_ms does not advance its key's stream. The
/// detector state is left untouched.
class NonMonotonicSample : public DataError {
 public:
  using DataError::DataError;
};

class Detector {
 public:
  explicit Detector(DetectorConfig cfg = {}) : cfg_(cfg) { cfg_.validate(); }

  const DetectorConfig& config() const { return cfg_; }

  std::vector<KeyEventRecord> feed(const ForceSample& sample) {
    if (!std::isfinite(sample.force_n) || sample.force_n < 0.0)
      throw DataError("sample force_n must be finite and >= 0");
    auto it = keys_.find(sample.key);
    if (it == keys_.end()) it = keys_.emplace(sample.key, KeyState(cfg_.smooth_window_samples)).first;
    KeyState& ks = it->second;
    if (ks.last_t && sample.t_ms <= *ks.last_t)
      throw NonMonotonicSample("non-monotonic t_ms for key '" + sample.key + "': " +
                               std::to_string(sample.t_ms) + " after " + std::to_string(*ks.last_t));

    const double f = ks.push(sample.force_n);
    const double slope = ks.last_t ? (f - ks.last_f) * 1000.0 / static_cast<double>(sample.t_ms - *ks.last_t) : 0.0;
    if (ks.last_t) ks.interval_ms = sample.t_ms - *ks.last_t;
    ks.last_t = sample.t_ms;
    ks.last_f = f;

    std::vector<KeyEventRecord> out;
    step(ks, sample.key, sample.t_ms, f, slope, out);
    return out;
  }

  /// Closes every open cycle as though force fell below the release floor one
  /// sample interval after the last sample. Keys are visited in name order.
  std::vector<KeyEventRecord> end_of_stream() {
    std::vector<KeyEventRecord> out;
    for (auto& [key, ks] : keys_) {
      if (ks.phase != Phase::Idle) {
        const std::int64_t t = *ks.last_t + ks.interval_ms;
        switch (ks.phase) {
          case Phase::Contact:
            emit(out, t, key, EventKind::ClassicalDepress);
            emit(out, t, key, EventKind::ClassicalRelease);
            break;
          case Phase::ClassicalDown:
            emit(out, t, key, EventKind::ClassicalRelease);
            break;
          case Phase::OnePress:
            if (ks.sub == OnePressPhase::PeakCandidate) commit_peak(ks, key, out);
            emit(out, t, key, EventKind::OnePressRelease);
            break;
          case Phase::Idle:
            break;
        }
      }
      ks.reset_signal();
    }
    return out;
  }

  Phase phase(std::string_view key) const {
    auto it = keys_.find(key);
    return it == keys_.end() ? Phase::Idle : it->second.phase;
  }

  OnePressPhase one_press_phase(std::string_view key) const {
    auto it = keys_.find(key);
    return it == keys_.end() ? OnePressPhase::Baseline : it->second.sub;
  }

 private:
  struct KeyState {
    explicit KeyState(int window) : ring(static_cast<std::size_t>(window), 0.0) {}

    // Trailing moving average, summed oldest first; the key is assumed at
    // rest before its first sample.
    double push(double raw) {
      ring[pos] = raw;
      pos = (pos + 1) % ring.size();
      double sum = 0.0;
      for (std::size_t k = 0; k < ring.size(); ++k) sum += ring[(pos + k) % ring.size()];
      return sum / static_cast<double>(ring.size());
    }

    void reset_signal() {
      std::fill(ring.begin(), ring.end(), 0.0);
      last_f = 0.0;
      phase = Phase::Idle;
      sub = OnePressPhase::Baseline;
    }

    Phase phase = Phase::Idle;
    OnePressPhase sub = OnePressPhase::Baseline;
    std::int64_t t_start = 0;
    double running_apex = 0.0;
    std::int64_t apex_t = 0;
    std::int64_t refractory_until = 0;

    std::vector<double> ring;
    std::size_t pos = 0;
    double last_f = 0.0;
    std::optional<std::int64_t> last_t;
    std::int64_t interval_ms = 10;
  };

  static void emit(std::vector<KeyEventRecord>& out, std::int64_t t, const std::string& key, EventKind kind,
                   std::optional<double> apex = std::nullopt) {
    out.push_back({t, key, kind, apex});
  }

  // Classifies the pending candidate; returns true when an event was emitted.
  bool commit_peak(KeyState& ks, const std::string& key, std::vector<KeyEventRecord>& out) const {
    const double apex = std::min(ks.running_apex, cfg_.usable_ceiling_n);
    switch (classify_apex(apex, cfg_)) {
      case ApexClass::Hard: emit(out, ks.apex_t, key, EventKind::HardRepeat, apex); break;
      case ApexClass::Medium: emit(out, ks.apex_t, key, EventKind::MediumRepeat, apex); break;
      case ApexClass::None:
        ks.sub = OnePressPhase::Baseline;
        return false;
    }
    ks.sub = OnePressPhase::Refractory;
    ks.refractory_until = ks.apex_t + cfg_.refractory_ms;
    return true;
  }

  void step(KeyState& ks, const std::string& key, std::int64_t t, double f, double slope,
            std::vector<KeyEventRecord>& out) const {
    switch (ks.phase) {
      case Phase::Idle:
        if (!(f > cfg_.release_floor_n)) return;
        ks.phase = Phase::Contact;
        ks.t_start = t;
        [[fallthrough]];
      case Phase::Contact: {
        const std::int64_t held = t - ks.t_start;
        if (f < cfg_.release_floor_n) {
          // Quick soft tap: the deferred classical pair is recreated on release.
          emit(out, t, key, EventKind::ClassicalDepress);
          emit(out, t, key, EventKind::ClassicalRelease);
          ks.phase = Phase::Idle;
        } else if (f > cfg_.soft_band_max_n && held < cfg_.hold_timeout_ms) {
          emit(out, t, key, EventKind::ClassicalDepress);
          ks.phase = Phase::ClassicalDown;
        } else if (held >= cfg_.hold_timeout_ms) {
          emit(out, t, key, EventKind::OnePressEnter);
          ks.phase = Phase::OnePress;
          ks.sub = OnePressPhase::Baseline;
        }
        return;
      }
      case Phase::ClassicalDown:
        if (f < cfg_.release_floor_n) {
          emit(out, t, key, EventKind::ClassicalRelease);
          ks.phase = Phase::Idle;
        }
        return;
      case Phase::OnePress:
        if (ks.sub == OnePressPhase::Refractory && t >= ks.refractory_until) ks.sub = OnePressPhase::Baseline;
        if (ks.sub == OnePressPhase::PeakCandidate) {
          if (slope <= 0.0) {
            commit_peak(ks, key, out);
            if (ks.sub == OnePressPhase::Refractory && t >= ks.refractory_until) ks.sub = OnePressPhase::Baseline;
          } else if (f > ks.running_apex) {
            ks.running_apex = f;
            ks.apex_t = t;
          }
        }
        if (f < cfg_.release_floor_n) {
          emit(out, t, key, EventKind::OnePressRelease);
          ks.phase = Phase::Idle;
          ks.sub = OnePressPhase::Baseline;
        } else if (ks.sub == OnePressPhase::Baseline && slope > cfg_.onset_slope_n_per_s) {
          ks.sub = OnePressPhase::PeakCandidate;
          ks.running_apex = f;
          ks.apex_t = t;
        }
        return;
    }
  }

  DetectorConfig cfg_;
  std::map<std::string, KeyState, std::less<>> keys_;
};

/// Streams a whole trace (in the given order) through a fresh detector and
/// flushes it.
inline std::vector<KeyEventRecord> detect(const Trace& trace, const DetectorConfig& cfg = {}) {
  Detector d(cfg);
  std::vector<KeyEventRecord> out;
  for (const auto& s : trace) {
    auto ev = d.feed(s);
    out.insert(out.end(), ev.begin(), ev.end());
  }
  auto tail = d.end_of_stream();
  out.insert(out.end(), tail.begin(), tail.end());
  return out;
}

}  // namespace onepress
