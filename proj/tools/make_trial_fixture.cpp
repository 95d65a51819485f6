// Writes the 70-attempt trial fixture: seven scripted subjects, ten counted
// attempts each, 18 seeded failures. For every subject it emits the press
// script, and the detector events of its synthesized trace.
//
// usage: make_trial_fixture <out-dir>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "onepress/onepress.hpp"

using namespace onepress;

namespace {

// P perfect, U early release, q quick tap, H hard during navigation,
// M medium instead of hard, O wrong option. Only the first ten count; the
// last subject's extra attempts make nine perfect executions in a row, four
// of them inside the counted ten.
const std::vector<std::string> kPlans = {
    "PPPPPPUPPP", "PUPPPPHPPP", "PPMPPPPPqP", "UPPHPPMPPP",
    "PPUPMPPOPP", "PPPHPPPUPP", "qPHMUMPPPPPPPPP",
};

constexpr int kTarget = 8;
constexpr double kNoiseSigma = 0.02;

Behavior behavior_of(char c) {
  switch (c) {
    case 'P': return Behavior::Perfect;
    case 'U': return Behavior::EarlyRelease;
    case 'q': return Behavior::QuickTap;
    case 'H': return Behavior::HardDuringNavigation;
    case 'M': return Behavior::MediumInsteadOfHard;
    case 'O': return Behavior::WrongOption;
  }
  throw DataError(std::string("unknown plan letter '") + c + "'");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_trial_fixture <out-dir>\n";
    return 2;
  }
  const std::filesystem::path dir = argv[1];
  std::filesystem::create_directories(dir);

  nlohmann::ordered_json plan;
  plan["target"] = kTarget;
  plan["menu_size"] = 10;
  plan["noise_sigma_n"] = kNoiseSigma;
  plan["legend"] = {{"P", "perfect"}, {"U", "early-release"}, {"q", "quick-tap"},
                    {"H", "hard-during-navigation"}, {"M", "medium-instead-of-hard"}, {"O", "wrong-option"}};
  plan["subjects"] = nlohmann::ordered_json::array();

  SensorModel sensor;
  sensor.noise_sigma_n = kNoiseSigma;
  for (std::size_t i = 0; i < kPlans.size(); ++i) {
    const auto name = "subject" + std::to_string(i + 1);
    std::mt19937_64 rng(1000 + i);
    PressScript script;
    script.then(Segment::idle(300));
    for (char c : kPlans[i]) append_attempt(script, behavior_of(c), kTarget, PressStyle::jittered(rng));

    std::ofstream(dir / (name + ".script.json")) << script_to_json(script).dump(1) << '\n';
    const auto trace = synthesize_trace(script, sensor, i + 1);
    std::ofstream events(dir / (name + ".jsonl"), std::ios::binary);
    write_events(events, detect(trace));

    nlohmann::ordered_json s;
    s["name"] = name;
    s["plan"] = kPlans[i];
    s["style_seed"] = 1000 + i;
    s["noise_seed"] = i + 1;
    plan["subjects"].push_back(std::move(s));
  }
  std::ofstream(dir / "plan.json") << plan.dump(2) << '\n';
  return 0;
}
