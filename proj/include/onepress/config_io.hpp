#pragma once

// JSON config documents: {"detector": {...}, "wytiwyg": {...}}. Every field is
// an optional override of the defaults; unknown fields are rejected.

#include <functional>
#include <istream>
#include <map>
#include <string>

#include "json.hpp"
#include "onepress/detector.hpp"
#include "onepress/error.hpp"
#include "onepress/wytiwyg.hpp"

namespace onepress {

namespace detail {

template <typename Config>
using FieldSetters = std::map<std::string, std::function<void(Config&, const nlohmann::json&)>>;

template <typename Config>
Config apply_overrides(const nlohmann::json& j, Config cfg, const FieldSetters<Config>& setters,
                       const std::string& what) {
  if (!j.is_object()) throw DataError(what + ": expected an object");
  for (const auto& [name, value] : j.items()) {
    auto it = setters.find(name);
    if (it == setters.end()) throw DataError(what + ": unknown field '" + name + "'");
    try {
      it->second(cfg, value);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(what + "." + name + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

#define ONEPRESS_FIELD(Config, name) \
  {#name, [](Config& c, const nlohmann::json& v) { v.get_to(c.name); }}

}  // namespace detail

inline DetectorConfig detector_config_from_json(const nlohmann::json& j, DetectorConfig base = {}) {
  static const detail::FieldSetters<DetectorConfig> setters = {
      ONEPRESS_FIELD(DetectorConfig, usable_floor_n),      ONEPRESS_FIELD(DetectorConfig, usable_ceiling_n),
      ONEPRESS_FIELD(DetectorConfig, soft_band_max_n),     ONEPRESS_FIELD(DetectorConfig, hold_timeout_ms),
      ONEPRESS_FIELD(DetectorConfig, smooth_window_samples), ONEPRESS_FIELD(DetectorConfig, onset_slope_n_per_s),
      ONEPRESS_FIELD(DetectorConfig, medium_min_apex_n),   ONEPRESS_FIELD(DetectorConfig, hard_min_apex_n),
      ONEPRESS_FIELD(DetectorConfig, refractory_ms),       ONEPRESS_FIELD(DetectorConfig, release_floor_n),
  };
  return detail::apply_overrides(j, base, setters, "detector config");
}

inline WytiwygConfig wytiwyg_config_from_json(const nlohmann::json& j, WytiwygConfig base = {}) {
  static const detail::FieldSetters<WytiwygConfig> setters = {
      ONEPRESS_FIELD(WytiwygConfig, dwell_ms),
      ONEPRESS_FIELD(WytiwygConfig, preview_contrast),
  };
  return detail::apply_overrides(j, base, setters, "wytiwyg config");
}

#undef ONEPRESS_FIELD

inline nlohmann::ordered_json to_json(const DetectorConfig& c) {
  nlohmann::ordered_json j;
  j["usable_floor_n"] = c.usable_floor_n;
  j["usable_ceiling_n"] = c.usable_ceiling_n;
  j["soft_band_max_n"] = c.soft_band_max_n;
  j["hold_timeout_ms"] = c.hold_timeout_ms;
  j["smooth_window_samples"] = c.smooth_window_samples;
  j["onset_slope_n_per_s"] = c.onset_slope_n_per_s;
  j["medium_min_apex_n"] = c.medium_min_apex_n;
  j["hard_min_apex_n"] = c.hard_min_apex_n;
  j["refractory_ms"] = c.refractory_ms;
  j["release_floor_n"] = c.release_floor_n;
  return j;
}

struct AppConfig {
  DetectorConfig detector;
  WytiwygConfig wytiwyg;
};

inline AppConfig app_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DataError("config: expected an object");
  AppConfig cfg;
  for (const auto& [name, value] : j.items()) {
    if (name == "detector") cfg.detector = detector_config_from_json(value);
    else if (name == "wytiwyg") cfg.wytiwyg = wytiwyg_config_from_json(value);
    else throw DataError("config: unknown section '" + name + "'");
  }
  return cfg;
}

inline AppConfig read_app_config(std::istream& is) {
  try {
    return app_config_from_json(nlohmann::json::parse(is));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("config: ") + e.what());
  }
}

}  // namespace onepress
