#pragma once

// JSON-lines serialization of detector events:
//   {"t_ms":510,"key":"space","kind":"MediumRepeat","apex_n":1.59}
// Field order is fixed; apex_n appears only on peak events.

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "onepress/detector.hpp"
#include "onepress/error.hpp"

namespace onepress {

inline nlohmann::ordered_json to_json(const KeyEventRecord& e) {
  nlohmann::ordered_json j;
  j["t_ms"] = e.t_ms;
  j["key"] = e.key;
  j["kind"] = to_string(e.kind);
  if (e.apex_n) j["apex_n"] = *e.apex_n;
  return j;
}

/// Same fields behind a leading "type":"event", as used on the wire and in
/// trial transcripts.
inline nlohmann::ordered_json to_tagged_json(const KeyEventRecord& e) {
  nlohmann::ordered_json j;
  j["type"] = "event";
  j["t_ms"] = e.t_ms;
  j["key"] = e.key;
  j["kind"] = to_string(e.kind);
  if (e.apex_n) j["apex_n"] = *e.apex_n;
  return j;
}

inline KeyEventRecord event_from_json(const nlohmann::json& j) {
  KeyEventRecord e;
  try {
    e.t_ms = j.at("t_ms").get<std::int64_t>();
    e.key = j.at("key").get<std::string>();
    e.kind = event_kind_from_string(j.at("kind").get<std::string>());
    if (j.contains("apex_n")) e.apex_n = j.at("apex_n").get<double>();
  } catch (const nlohmann::json::exception& ex) {
    throw DataError(std::string("event: ") + ex.what());
  }
  if (e.is_peak() != e.apex_n.has_value())
    throw DataError("event: apex_n must be present exactly on MediumRepeat/HardRepeat");
  return e;
}

inline std::string to_json_line(const KeyEventRecord& e) { return to_json(e).dump(); }

inline void write_events(std::ostream& os, const std::vector<KeyEventRecord>& events) {
  for (const auto& e : events) os << to_json_line(e) << '\n';
}

inline std::string write_events(const std::vector<KeyEventRecord>& events) {
  std::ostringstream os;
  write_events(os, events);
  return os.str();
}

inline std::vector<KeyEventRecord> read_events(std::istream& is) {
  std::vector<KeyEventRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    try {
      out.push_back(event_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& ex) {
      throw ParseError(line_no, ex.what());
    } catch (const ParseError&) {
      throw;
    } catch (const DataError& ex) {
      throw ParseError(line_no, ex.what());
    }
  }
  return out;
}

inline std::vector<KeyEventRecord> read_events(const std::string& text) {
  std::istringstream is(text);
  return read_events(is);
}

}  // namespace onepress
