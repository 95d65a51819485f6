#pragma once

// Trace CSV (`t_ms,key,force_n`) and press-script JSON documents.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "onepress/error.hpp"
#include "onepress/signal_model.hpp"

namespace onepress {

inline constexpr std::string_view kTraceHeader = "t_ms,key,force_n";

namespace detail {

/// Shortest decimal that parses back to exactly `v`.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline bool valid_key(std::string_view key) {
  if (key.empty()) return false;
  return std::none_of(key.begin(), key.end(), [](char c) {
    return c == ',' || c == '"' || c == ' ' || c == '\t' || c == '\r' || c == '\n';
  });
}

inline std::string_view chomp(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace detail

/// Writes samples in (key, t_ms) order. Throws DataError if any sample breaks
/// the ForceSample invariants.
inline void write_trace(std::ostream& os, Trace samples) {
  std::stable_sort(samples.begin(), samples.end(), [](const ForceSample& a, const ForceSample& b) {
    return a.key != b.key ? a.key < b.key : a.t_ms < b.t_ms;
  });
  os << kTraceHeader << '\n';
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (!detail::valid_key(s.key)) throw DataError("sample " + std::to_string(i) + ": invalid key '" + s.key + "'");
    if (s.t_ms < 0) throw DataError("sample " + std::to_string(i) + ": negative t_ms");
    if (!std::isfinite(s.force_n) || s.force_n < 0.0)
      throw DataError("sample " + std::to_string(i) + ": force_n must be finite and >= 0");
    if (i > 0 && samples[i - 1].key == s.key && samples[i - 1].t_ms >= s.t_ms)
      throw DataError("samples for key '" + s.key + "' have non-increasing t_ms " +
                      std::to_string(samples[i - 1].t_ms) + " then " + std::to_string(s.t_ms));
    os << s.t_ms << ',' << s.key << ',' << detail::format_double(s.force_n) << '\n';
  }
}

inline std::string write_trace(const Trace& samples) {
  std::ostringstream os;
  write_trace(os, samples);
  return os.str();
}

/// Parses a trace CSV. Errors carry the 1-based line number.
inline Trace read_trace(std::istream& is) {
  Trace out;
  std::string raw;
  std::size_t line_no = 0;
  bool seen_header = false;
  // Last row per key, for the ordering checks.
  std::map<std::string, std::pair<std::int64_t, std::size_t>, std::less<>> last;
  std::string prev_key;
  while (std::getline(is, raw)) {
    ++line_no;
    std::string_view line = detail::chomp(raw);
    if (!seen_header) {
      if (line != kTraceHeader)
        throw ParseError(line_no, "expected header '" + std::string(kTraceHeader) + "'");
      seen_header = true;
      continue;
    }
    if (line.empty()) continue;

    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos || line.find(',', c2 + 1) != std::string_view::npos)
      throw ParseError(line_no, "expected 3 comma-separated fields");
    const auto t_field = line.substr(0, c1);
    const auto key = line.substr(c1 + 1, c2 - c1 - 1);
    const auto f_field = line.substr(c2 + 1);

    ForceSample s;
    auto tr = std::from_chars(t_field.data(), t_field.data() + t_field.size(), s.t_ms);
    if (tr.ec != std::errc{} || tr.ptr != t_field.data() + t_field.size() || s.t_ms < 0)
      throw ParseError(line_no, "t_ms must be a non-negative integer");
    if (!detail::valid_key(key)) throw ParseError(line_no, "invalid key");
    s.key = std::string(key);
    auto fr = std::from_chars(f_field.data(), f_field.data() + f_field.size(), s.force_n);
    if (fr.ec != std::errc{} || fr.ptr != f_field.data() + f_field.size() ||
        !std::isfinite(s.force_n) || s.force_n < 0.0)
      throw ParseError(line_no, "force_n must be a finite non-negative decimal");

    if (!prev_key.empty() && s.key < prev_key)
      throw ParseError(line_no, "key '" + s.key + "' after '" + prev_key +
                                    "': rows must be sorted by (key, t_ms)");
    if (auto it = last.find(s.key); it != last.end()) {
      if (s.key != prev_key)
        throw ParseError(line_no, "rows for key '" + s.key + "' are not contiguous");
      if (s.t_ms <= it->second.first)
        throw ParseError(line_no, "non-monotonic t_ms for key '" + s.key + "': line " +
                                      std::to_string(it->second.second) + " has " +
                                      std::to_string(it->second.first) + ", line " +
                                      std::to_string(line_no) + " has " + std::to_string(s.t_ms));
    }
    last[s.key] = {s.t_ms, line_no};
    prev_key = s.key;
    out.push_back(std::move(s));
  }
  if (!seen_header) throw ParseError(1, "missing header '" + std::string(kTraceHeader) + "'");
  return out;
}

inline Trace read_trace(std::string_view text) {
  std::istringstream is{std::string(text)};
  return read_trace(is);
}

// Script documents are JSON:
//   {"key": "space", "segments": [{"kind": "soft_hold", "duration_ms": 700,
//     "force_n": 0.8, "rise_ms": 50}, ...]}
// or several keys at once: {"tracks": [{"key": ..., "segments": [...]}, ...]}.
// rise_ms / fall_ms default per segment kind when omitted.

inline nlohmann::ordered_json script_to_json(const PressScript& script) {
  nlohmann::ordered_json segs = nlohmann::ordered_json::array();
  for (const auto& s : script.segments) {
    nlohmann::ordered_json j;
    j["kind"] = to_string(s.kind);
    j["duration_ms"] = s.duration_ms;
    if (s.kind != SegmentKind::Idle) j["force_n"] = s.force_n;
    j["rise_ms"] = s.rise_ms;
    j["fall_ms"] = s.fall_ms;
    segs.push_back(std::move(j));
  }
  nlohmann::ordered_json doc;
  doc["key"] = script.key;
  doc["segments"] = std::move(segs);
  return doc;
}

inline PressScript script_from_json(const nlohmann::json& doc) {
  PressScript script;
  try {
    script.key = doc.value("key", std::string("space"));
    const auto& segs = doc.at("segments");
    if (!segs.is_array()) throw DataError("script: 'segments' must be an array");
    for (std::size_t i = 0; i < segs.size(); ++i) {
      const auto& j = segs[i];
      Segment s;
      try {
        s.kind = segment_kind_from_string(j.at("kind").get<std::string>());
        const auto ramps = default_ramps(s.kind);
        s.duration_ms = j.at("duration_ms").get<std::int64_t>();
        s.force_n = j.value("force_n", 0.0);
        s.rise_ms = j.value("rise_ms", ramps.rise_ms);
        s.fall_ms = j.value("fall_ms", ramps.fall_ms);
      } catch (const nlohmann::json::exception& e) {
        throw DataError("script segment " + std::to_string(i) + ": " + e.what());
      } catch (const DataError& e) {
        throw DataError("script segment " + std::to_string(i) + ": " + e.what());
      }
      script.segments.push_back(s);
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("script: ") + e.what());
  }
  script.validate();
  return script;
}

inline std::vector<PressScript> scripts_from_json(const nlohmann::json& doc) {
  std::vector<PressScript> out;
  if (doc.contains("tracks")) {
    for (const auto& t : doc.at("tracks")) out.push_back(script_from_json(t));
  } else {
    out.push_back(script_from_json(doc));
  }
  return out;
}

inline std::vector<PressScript> read_scripts(std::istream& is) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("script: ") + e.what());
  }
  return scripts_from_json(doc);
}

}  // namespace onepress
