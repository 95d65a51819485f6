// onepress: command-line front end for the one-press control layer.
//
//   gen      press script -> force trace CSV
//   detect   force trace -> events JSONL
//   replay   events -> menu engine wire lines + final state
//   resolve  events -> bound actions
//   trial    session event logs -> trial log + summary
//   serve    line-delimited JSON gateway over TCP
//
// Exit codes: 0 ok, 1 invalid input data, 2 usage / unreadable file.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "onepress/onepress.hpp"
#include "onepress/server.hpp"

namespace fs = std::filesystem;
using namespace onepress;

namespace {

constexpr const char* kConfigEnv = "ONEPRESS_CONFIG";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  return in;
}

/// Writes to `path`, or stdout when empty / "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw UsageError("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

AppConfig load_config(const std::string& flag) {
  std::string path = flag;
  if (path.empty())
    if (const char* env = std::getenv(kConfigEnv)) path = env;
  if (path.empty()) return {};
  auto in = open_in(path);
  return read_app_config(in);
}

MenuModel load_menu(const std::string& path) {
  if (path.empty()) return suggest10_menu();
  auto in = open_in(path);
  return read_menu(in);
}

std::vector<KeyEventRecord> load_events(const std::string& path) {
  auto in = open_in(path);
  return read_events(in);
}

std::vector<fs::path> session_files(const std::string& where) {
  std::vector<fs::path> files;
  if (fs::is_regular_file(where)) {
    files.emplace_back(where);
  } else if (fs::is_directory(where)) {
    for (const auto& entry : fs::directory_iterator(where))
      if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
  } else {
    throw UsageError("no such file or directory '" + where + "'");
  }
  if (files.empty()) throw UsageError("no .jsonl session files in '" + where + "'");
  return files;
}

void print_error(const char* kind, const std::string& message) {
  nlohmann::ordered_json j;
  j["error"] = kind;
  j["message"] = message;
  std::cerr << j.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"One-press control: force traces to key events, virtual modifiers and menu interaction"};
  app.require_subcommand(1);

  std::string out_path, config_path;

  // gen
  auto* gen = app.add_subcommand("gen", "Synthesize a force trace from a press script");
  std::string script_path;
  std::uint64_t seed = 0;
  SensorModel sensor;
  gen->add_option("-s,--script", script_path, "Press script (JSON)")->required();
  gen->add_option("--seed", seed, "Noise seed");
  gen->add_option("--floor", sensor.floor_n, "Sensor floor in N")->capture_default_str();
  gen->add_option("--saturation", sensor.saturation_n, "Sensor saturation in N")->capture_default_str();
  gen->add_option("--noise", sensor.noise_sigma_n, "Noise std-dev in N")->capture_default_str();
  gen->add_option("--rate", sensor.sample_rate_hz, "Sample rate in Hz")->capture_default_str();
  gen->add_option("-o,--output", out_path, "Trace CSV (default stdout)");

  // detect
  auto* det = app.add_subcommand("detect", "Run the detector over a trace");
  std::string trace_path;
  det->add_option("-t,--trace", trace_path, "Trace CSV")->required();
  det->add_option("-c,--config", config_path, std::string("Config JSON (default $") + kConfigEnv + ")");
  det->add_option("-o,--output", out_path, "Events JSONL (default stdout)");

  // replay
  auto* rep = app.add_subcommand("replay", "Drive the menu engine with detector events");
  std::string events_path, menu_path, engine_key = "space";
  rep->add_option("-e,--events", events_path, "Events JSONL")->required();
  rep->add_option("-m,--menu", menu_path, "Menu fixture JSON (default: built-in suggest10)");
  rep->add_option("-k,--key", engine_key, "Key that drives the menu")->capture_default_str();
  rep->add_option("-c,--config", config_path, "Config JSON");
  rep->add_option("-o,--output", out_path, "Wire lines (default stdout)");

  // resolve
  auto* res = app.add_subcommand("resolve", "Map events to actions through a binding table");
  std::string bindings_path;
  res->add_option("-e,--events", events_path, "Events JSONL")->required();
  res->add_option("-b,--bindings", bindings_path, "Binding table (default: built-in sample table)");
  res->add_option("-o,--output", out_path, "Actions JSONL (default stdout)");

  // trial
  auto* tri = app.add_subcommand("trial", "Classify task attempts from recorded sessions");
  std::string preset = "stage4", sessions_path, log_path, json_path;
  std::optional<int> target, attempts;
  tri->add_option("--task", preset, "Task preset: stage1..stage4")->capture_default_str();
  tri->add_option("--sessions", sessions_path, "Directory of session event logs (*.jsonl) or one file")->required();
  tri->add_option("--target", target, "Override the target option");
  tri->add_option("--attempts", attempts, "Override attempts per session");
  tri->add_option("-c,--config", config_path, "Config JSON");
  tri->add_option("--log", log_path, "Write the trial log (JSONL)");
  tri->add_option("--json", json_path, "Write the summary as JSON");

  // serve
  auto* srv = app.add_subcommand("serve", "Run the session gateway");
  std::string host = "127.0.0.1";
  std::uint16_t port = 7411;
  std::vector<std::string> menu_paths;
  srv->add_option("--host", host, "IPv4 address to bind")->capture_default_str();
  srv->add_option("-p,--port", port, "TCP port (0 = any)")->capture_default_str();
  srv->add_option("-c,--config", config_path, "Default config JSON");
  srv->add_option("--menu", menu_paths, "Extra menu fixtures to offer");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what());
    return 2;
  }

  try {
    if (*gen) {
      auto in = open_in(script_path);
      const auto scripts = read_scripts(in);
      const auto trace = synthesize_traces(scripts, sensor, seed);
      Output out(out_path);
      write_trace(out.stream(), trace);
    } else if (*det) {
      const auto cfg = load_config(config_path);
      auto in = open_in(trace_path);
      const auto trace = read_trace(in);
      const auto events = detect(trace, cfg.detector);
      Output out(out_path);
      write_events(out.stream(), events);
    } else if (*rep) {
      const auto cfg = load_config(config_path);
      const auto menu = load_menu(menu_path);
      const auto events = load_events(events_path);
      Output out(out_path);
      for (const auto& line : replay_lines(events, menu, cfg.wytiwyg, engine_key)) out.stream() << line << '\n';
    } else if (*res) {
      BindingTable table = sample_bindings();
      if (!bindings_path.empty()) {
        auto in = open_in(bindings_path);
        table = read_bindings(in);
      }
      const auto events = load_events(events_path);
      Output out(out_path);
      for (const auto& e : events) {
        auto m = to_modified(e);
        if (!m) continue;
        nlohmann::ordered_json j;
        j["t_ms"] = m->t_ms;
        j["key"] = m->key;
        j["modifier"] = to_string(m->modifier);
        j["action"] = table.resolve(*m);
        out.stream() << j.dump() << '\n';
      }
    } else if (*tri) {
      const auto cfg = load_config(config_path);
      TaskSpec task = task_preset(preset);
      if (target) task.target = *target;
      if (attempts) task.attempts = *attempts;
      task.validate();

      std::optional<Output> log;
      if (!log_path.empty()) log.emplace(log_path);
      std::vector<std::pair<std::string, TrialSummary>> rows;
      nlohmann::ordered_json sessions = nlohmann::ordered_json::array();
      std::vector<TrialSummary> parts;
      for (const auto& file : session_files(sessions_path)) {
        const auto name = file.stem().string();
        TrialLog trial;
        try {
          trial = run_trial(task, split_cycles(load_events(file.string())), cfg.wytiwyg);
        } catch (const DataError& e) {
          throw DataError(file.filename().string() + ": " + e.what());
        }
        if (log) write_trial_log(log->stream(), trial, name);
        auto s = summarize(trial);
        rows.emplace_back(name, s);
        parts.push_back(s);
        nlohmann::ordered_json j;
        j["session"] = name;
        j["summary"] = to_json(s);
        sessions.push_back(std::move(j));
      }
      const auto total = combine(parts);
      rows.emplace_back("total", total);
      print_summary_table(std::cout, rows);
      const double mean_score = static_cast<double>(total.score) / static_cast<double>(parts.size());
      std::cout << "mean score per session: " << std::fixed << std::setprecision(2) << mean_score << '\n';
      if (!json_path.empty()) {
        nlohmann::ordered_json doc;
        doc["task"] = task.id;
        doc["target"] = task.target;
        doc["menu_size"] = task.menu_size;
        doc["sessions"] = std::move(sessions);
        doc["total"] = to_json(total);
        doc["mean_score"] = mean_score;
        Output out(json_path);
        out.stream() << doc.dump(2) << '\n';
      }
    } else if (*srv) {
      auto fixtures = GatewayFixtures::builtin(load_config(config_path));
      for (const auto& p : menu_paths) {
        auto m = load_menu(p);
        fixtures.menus.insert_or_assign(m.id, m);
      }
      GatewayServer server(std::make_shared<const GatewayFixtures>(std::move(fixtures)), host, port);
      std::cout << "listening on " << host << ":" << server.port() << std::endl;
      server.serve();
    }
  } catch (const UsageError& e) {
    print_error("usage", e.what());
    return 2;
  } catch (const DataError& e) {
    print_error("data", e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error("runtime", e.what());
    return 1;
  }
  return 0;
}
