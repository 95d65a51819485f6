#pragma once

// Force traces and the simulated sensor that stands in for pressure-sensitive
// keyboard hardware.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "onepress/error.hpp"

namespace onepress {

/// One conditioned force reading of one key.
struct ForceSample {
  std::int64_t t_ms = 0;
  std::string key;
  double force_n = 0.0;

  friend bool operator==(const ForceSample&, const ForceSample&) = default;
};

using Trace = std::vector<ForceSample>;

/// Identity response with a dead zone below `floor_n`, clamping above
/// `saturation_n`, and additive Gaussian noise.
struct SensorModel {
  double floor_n = 0.6;
  double saturation_n = 3.0;
  double noise_sigma_n = 0.0;
  double sample_rate_hz = 100.0;

  void validate() const {
    if (!(std::isfinite(floor_n) && std::isfinite(saturation_n) && floor_n > 0.0 &&
          floor_n < saturation_n))
      throw DataError("sensor: require 0 < floor_n < saturation_n");
    if (!(std::isfinite(noise_sigma_n) && noise_sigma_n >= 0.0))
      throw DataError("sensor: noise_sigma_n must be finite and >= 0");
    // Timestamps are whole milliseconds, so faster rates would repeat them.
    if (!(sample_rate_hz > 0.0 && sample_rate_hz <= 1000.0))
      throw DataError("sensor: sample_rate_hz must be in (0, 1000]");
  }

  /// Maps a true force (plus noise) to the emitted reading.
  double respond(double force) const {
    if (!(force >= floor_n)) return 0.0;
    return std::min(force, saturation_n);
  }
};

enum class SegmentKind { Idle, QuickStrike, SoftHold, Peak };

inline std::string_view to_string(SegmentKind k) {
  switch (k) {
    case SegmentKind::Idle: return "idle";
    case SegmentKind::QuickStrike: return "quick_strike";
    case SegmentKind::SoftHold: return "soft_hold";
    case SegmentKind::Peak: return "peak";
  }
  return "?";
}

inline SegmentKind segment_kind_from_string(std::string_view s) {
  if (s == "idle") return SegmentKind::Idle;
  if (s == "quick_strike") return SegmentKind::QuickStrike;
  if (s == "soft_hold") return SegmentKind::SoftHold;
  if (s == "peak") return SegmentKind::Peak;
  throw DataError("unknown segment kind '" + std::string(s) + "'");
}

/// Default ramp lengths per segment kind, used when a script leaves them out.
struct RampDefaults {
  std::int64_t rise_ms;
  std::int64_t fall_ms;
};

inline RampDefaults default_ramps(SegmentKind k) {
  switch (k) {
    case SegmentKind::Idle: return {0, 20};
    case SegmentKind::QuickStrike: return {20, 20};
    case SegmentKind::SoftHold: return {50, 0};
    case SegmentKind::Peak: return {100, 100};
  }
  return {0, 0};
}

/// One piece of a press script.
///
///  - idle: ramp from the current level down to 0 over `fall_ms`, then rest.
///  - quick_strike: rise to `force_n`, hold, fall back to 0 before the segment
///    ends. Ends the depress cycle.
///  - soft_hold: ramp from the current level to `force_n` over `rise_ms`, hold.
///  - peak: from the current level rise to the apex `force_n` over `rise_ms`,
///    fall back to the same level over `fall_ms`, hold for the remainder.
struct Segment {
  SegmentKind kind = SegmentKind::Idle;
  std::int64_t duration_ms = 0;
  double force_n = 0.0;
  std::int64_t rise_ms = 0;
  std::int64_t fall_ms = 0;

  static Segment make(SegmentKind kind, std::int64_t duration_ms, double force_n = 0.0) {
    auto r = default_ramps(kind);
    return {kind, duration_ms, force_n, r.rise_ms, r.fall_ms};
  }
  static Segment idle(std::int64_t ms) { return make(SegmentKind::Idle, ms); }
  static Segment quick_strike(std::int64_t ms, double f) { return make(SegmentKind::QuickStrike, ms, f); }
  static Segment soft_hold(std::int64_t ms, double f) { return make(SegmentKind::SoftHold, ms, f); }
  static Segment peak(std::int64_t ms, double apex) { return make(SegmentKind::Peak, ms, apex); }

  friend bool operator==(const Segment&, const Segment&) = default;
};

struct PressScript {
  std::string key = "space";
  std::vector<Segment> segments;

  std::int64_t duration_ms() const {
    std::int64_t total = 0;
    for (const auto& s : segments) total += s.duration_ms;
    return total;
  }

  PressScript& then(Segment s) {
    segments.push_back(s);
    return *this;
  }

  /// Throws DataError naming the first offending segment (0-based index).
  void validate() const {
    if (key.empty()) throw DataError("script: key must not be empty");
    bool soft_cycle = false;
    for (std::size_t i = 0; i < segments.size(); ++i) {
      const auto& s = segments[i];
      auto fail = [&](const std::string& why) {
        throw DataError("script segment " + std::to_string(i) + " (" +
                        std::string(to_string(s.kind)) + "): " + why);
      };
      if (s.duration_ms <= 0) fail("duration_ms must be > 0");
      if (!std::isfinite(s.force_n) || s.force_n < 0.0) fail("force_n must be finite and >= 0");
      if (s.rise_ms < 0 || s.fall_ms < 0) fail("rise_ms and fall_ms must be >= 0");
      switch (s.kind) {
        case SegmentKind::Idle:
          if (s.fall_ms > s.duration_ms) fail("fall_ms exceeds duration_ms");
          soft_cycle = false;
          break;
        case SegmentKind::QuickStrike:
          if (s.rise_ms + s.fall_ms > s.duration_ms) fail("rise_ms + fall_ms exceeds duration_ms");
          soft_cycle = false;
          break;
        case SegmentKind::SoftHold:
          if (s.rise_ms > s.duration_ms) fail("rise_ms exceeds duration_ms");
          soft_cycle = true;
          break;
        case SegmentKind::Peak:
          if (s.rise_ms + s.fall_ms > s.duration_ms) fail("rise_ms + fall_ms exceeds duration_ms");
          if (!soft_cycle) fail("peak must follow a soft_hold in the same depress cycle");
          break;
      }
    }
  }
};

/// The noiseless force envelope of a script: a chain of raised-cosine ramps
/// and flat holds. Ramps are monotone between their end levels.
class Envelope {
 public:
  explicit Envelope(const PressScript& script) {
    script.validate();
    double level = 0.0;
    double t = 0.0;
    for (const auto& s : script.segments) {
      const double end = t + static_cast<double>(s.duration_ms);
      switch (s.kind) {
        case SegmentKind::Idle:
          t = ramp(t, s.fall_ms, level, 0.0);
          level = 0.0;
          break;
        case SegmentKind::QuickStrike:
          t = ramp(t, s.rise_ms, level, s.force_n);
          t = hold(t, end - static_cast<double>(s.fall_ms) - t, s.force_n);
          t = ramp(t, s.fall_ms, s.force_n, 0.0);
          level = 0.0;
          break;
        case SegmentKind::SoftHold:
          t = ramp(t, s.rise_ms, level, s.force_n);
          level = s.force_n;
          break;
        case SegmentKind::Peak:
          t = ramp(t, s.rise_ms, level, s.force_n);
          t = ramp(t, s.fall_ms, s.force_n, level);
          break;
      }
      hold(t, end - t, level);
      t = end;
    }
    duration_ms_ = t;
  }

  double duration_ms() const { return duration_ms_; }

  double at(double t_ms) const {
    if (pieces_.empty() || t_ms < 0.0) return 0.0;
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), t_ms,
                               [](double t, const Piece& p) { return t < p.t1; });
    if (it == pieces_.end()) return pieces_.back().v1;
    const Piece& p = *it;
    if (p.v0 == p.v1) return p.v0;
    const double u = (t_ms - p.t0) / (p.t1 - p.t0);
    return p.v0 + (p.v1 - p.v0) * 0.5 * (1.0 - std::cos(std::numbers::pi * u));
  }

 private:
  struct Piece {
    double t0, t1, v0, v1;
  };

  double ramp(double t, std::int64_t len, double from, double to) {
    if (len > 0) pieces_.push_back({t, t + static_cast<double>(len), from, to});
    return t + static_cast<double>(std::max<std::int64_t>(len, 0));
  }
  double hold(double t, double len, double v) {
    if (len > 0.0) pieces_.push_back({t, t + len, v, v});
    return t + std::max(len, 0.0);
  }

  std::vector<Piece> pieces_;
  double duration_ms_ = 0.0;
};

/// Standard normal variates from a seeded mt19937_64 via Box-Muller, so the
/// stream is identical on every standard library.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : rng_(seed) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Sample times are round(k * 1000 / rate) for every k with the sample
/// falling inside the script's duration.
inline std::vector<std::int64_t> sample_times(std::int64_t duration_ms, double sample_rate_hz) {
  const auto n = static_cast<std::int64_t>(
      std::floor(static_cast<double>(duration_ms) * sample_rate_hz / 1000.0 + 1e-9));
  std::vector<std::int64_t> times;
  times.reserve(static_cast<std::size_t>(std::max<std::int64_t>(n, 0)));
  for (std::int64_t k = 0; k < n; ++k)
    times.push_back(std::llround(static_cast<double>(k) * 1000.0 / sample_rate_hz));
  return times;
}

/// Renders a script through the sensor model. Pure in (script, sensor, seed).
inline Trace synthesize_trace(const PressScript& script, const SensorModel& sensor,
                              std::uint64_t seed) {
  sensor.validate();
  const Envelope env(script);
  GaussianSource noise(seed);
  Trace out;
  for (std::int64_t t : sample_times(script.duration_ms(), sensor.sample_rate_hz)) {
    double f = env.at(static_cast<double>(t));
    if (sensor.noise_sigma_n > 0.0) f += sensor.noise_sigma_n * noise.next();
    out.push_back({t, script.key, sensor.respond(f)});
  }
  return out;
}

/// Multi-key variant: track i is rendered with seed + i, results concatenated
/// in (key, t_ms) order.
inline Trace synthesize_traces(const std::vector<PressScript>& scripts, const SensorModel& sensor,
                               std::uint64_t seed) {
  Trace out;
  for (std::size_t i = 0; i < scripts.size(); ++i) {
    auto part = synthesize_trace(scripts[i], sensor, seed + i);
    out.insert(out.end(), part.begin(), part.end());
  }
  std::stable_sort(out.begin(), out.end(), [](const ForceSample& a, const ForceSample& b) {
    return a.key != b.key ? a.key < b.key : a.t_ms < b.t_ms;
  });
  return out;
}

}  // namespace onepress
