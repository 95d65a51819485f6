#pragma once

// Line-delimited JSON session protocol between a force source (the demo UI)
// and the detector + menu engine.
//
// Inbound, one JSON object per line:
//   {"type":"config","detector":{...},"wytiwyg":{...},"menu":"suggest10","key":"space"}
//   {"type":"sample","key":"space","t_ms":120,"force_n":0.8}
//   {"type":"end"}     close open cycles and report the final engine state
// Outbound:
//   {"type":"event","t_ms":..,"key":..,"kind":..,"apex_n":..}
//   {"type":"directive","kind":..,"t_ms":.., ...}
//   {"type":"state","phase":..,"cursor":..,"press_count":..,"option":..}
//   {"type":"error","code":..,"message":..}
//
// Time comes only from sample timestamps. Before each event reaches the
// engine, the engine clock is advanced to the event time; after each sample of
// the engine key, it is advanced to the sample time.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "onepress/config_io.hpp"
#include "onepress/detector.hpp"
#include "onepress/error.hpp"
#include "onepress/event_io.hpp"
#include "onepress/wytiwyg.hpp"

namespace onepress {

/// Immutable per-server data shared by every session.
struct GatewayFixtures {
  std::map<std::string, MenuModel, std::less<>> menus;
  AppConfig defaults;
  std::string default_menu = "suggest10";

  static GatewayFixtures builtin(AppConfig defaults = {}) {
    GatewayFixtures f;
    f.defaults = defaults;
    auto m = suggest10_menu();
    f.menus.emplace(m.id, m);
    auto n = MenuModel::numbered(10, "numbered10");
    f.menus.emplace(n.id, n);
    return f;
  }
};

inline std::string event_line(const KeyEventRecord& e) { return to_tagged_json(e).dump(); }

inline std::string directive_line(const UiDirective& d) { return to_json(d).dump(); }

inline std::string error_line(std::string_view code, std::string_view message) {
  nlohmann::ordered_json j;
  j["type"] = "error";
  j["code"] = code;
  j["message"] = message;
  return j.dump();
}

/// Routes detector events through a menu engine and renders the wire lines in
/// causal order. Shared by the live gateway and offline replay.
class EngineRouter {
 public:
  EngineRouter(WytiwygEngine engine, std::string key) : engine_(std::move(engine)), key_(std::move(key)) {}

  void on_event(const KeyEventRecord& e, std::vector<std::string>& out) {
    if (e.key == key_) append(engine_.on(EngineInput{InputKind::Tick, e.t_ms}), out);
    out.push_back(event_line(e));
    if (e.key == key_) append(engine_.on(e), out);
  }

  void on_time(std::string_view key, std::int64_t t, std::vector<std::string>& out) {
    if (key == key_) append(engine_.on(EngineInput{InputKind::Tick, t}), out);
  }

  std::string state_line() const { return to_json(engine_.state()).dump(); }
  const WytiwygEngine& engine() const { return engine_; }
  const std::string& key() const { return key_; }

 private:
  static void append(const std::vector<UiDirective>& ds, std::vector<std::string>& out) {
    for (const auto& d : ds) out.push_back(directive_line(d));
  }

  WytiwygEngine engine_;
  std::string key_;
};

/// Offline counterpart of a gateway session: events (as from `detect`) in,
/// the same outbound lines a live session would produce, ending with the
/// final state.
inline std::vector<std::string> replay_lines(const std::vector<KeyEventRecord>& events, const MenuModel& menu,
                                             const WytiwygConfig& cfg = {}, std::string key = "space") {
  EngineRouter router(WytiwygEngine(menu, cfg), std::move(key));
  std::vector<std::string> out;
  for (const auto& e : events) router.on_event(e, out);
  out.push_back(router.state_line());
  return out;
}

/// One connection's state: a detector and a menu engine. Not thread-safe;
/// the transport serializes lines per session.
class GatewaySession {
 public:
  explicit GatewaySession(std::shared_ptr<const GatewayFixtures> fixtures) : fixtures_(std::move(fixtures)) {}

  std::vector<std::string> handle_line(std::string_view line) {
    std::vector<std::string> out;
    nlohmann::json msg;
    try {
      msg = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      out.push_back(error_line("malformed", e.what()));
      return out;
    }
    if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string()) {
      out.push_back(error_line("malformed", "expected an object with a string 'type'"));
      return out;
    }
    const auto type = msg["type"].get<std::string>();
    if (type == "config") configure(msg, out);
    else if (type == "sample") sample(msg, out);
    else if (type == "end") finish(out);
    else out.push_back(error_line("unknown-type", "unknown message type '" + type + "'"));
    return out;
  }

  bool configured() const { return detector_.has_value(); }

 private:
  void configure(const nlohmann::json& msg, std::vector<std::string>& out) {
    try {
      auto det = msg.contains("detector") ? detector_config_from_json(msg["detector"], fixtures_->defaults.detector)
                                          : fixtures_->defaults.detector;
      auto wy = msg.contains("wytiwyg") ? wytiwyg_config_from_json(msg["wytiwyg"], fixtures_->defaults.wytiwyg)
                                        : fixtures_->defaults.wytiwyg;
      const auto menu_id = msg.value("menu", fixtures_->default_menu);
      auto it = fixtures_->menus.find(menu_id);
      if (it == fixtures_->menus.end()) {
        out.push_back(error_line("unknown-menu", "no menu fixture '" + menu_id + "'"));
        return;
      }
      detector_.emplace(det);
      router_.emplace(WytiwygEngine(it->second, wy), msg.value("key", std::string("space")));
    } catch (const nlohmann::json::exception& e) {
      out.push_back(error_line("bad-config", e.what()));
    } catch (const DataError& e) {
      out.push_back(error_line("bad-config", e.what()));
    }
  }

  void sample(const nlohmann::json& msg, std::vector<std::string>& out) {
    if (!detector_) {
      out.push_back(error_line("unconfigured", "send a config message before samples"));
      return;
    }
    ForceSample s;
    try {
      s.key = msg.at("key").get<std::string>();
      s.t_ms = msg.at("t_ms").get<std::int64_t>();
      s.force_n = msg.at("force_n").get<double>();
    } catch (const nlohmann::json::exception& e) {
      out.push_back(error_line("malformed", e.what()));
      return;
    }
    if (s.key.empty() || s.t_ms < 0) {
      out.push_back(error_line("malformed", "sample needs a non-empty key and t_ms >= 0"));
      return;
    }
    std::vector<KeyEventRecord> events;
    try {
      events = detector_->feed(s);
    } catch (const NonMonotonicSample& e) {
      out.push_back(error_line("non-monotonic", e.what()));
      return;
    } catch (const DataError& e) {
      out.push_back(error_line("bad-sample", e.what()));
      return;
    }
    for (const auto& e : events) router_->on_event(e, out);
    router_->on_time(s.key, s.t_ms, out);
  }

  void finish(std::vector<std::string>& out) {
    if (!detector_) {
      out.push_back(error_line("unconfigured", "send a config message before end"));
      return;
    }
    for (const auto& e : detector_->end_of_stream()) router_->on_event(e, out);
    out.push_back(router_->state_line());
  }

  std::shared_ptr<const GatewayFixtures> fixtures_;
  std::optional<Detector> detector_;
  std::optional<EngineRouter> router_;
};

}  // namespace onepress
