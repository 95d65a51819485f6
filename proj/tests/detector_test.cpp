#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "corpus.hpp"
#include "onepress/detector.hpp"
#include "onepress/event_io.hpp"
#include "onepress/trace_io.hpp"
#include "reference_detector.hpp"

using namespace onepress;

namespace {

std::vector<EventKind> kinds(const std::vector<KeyEventRecord>& events) {
  std::vector<EventKind> out;
  for (const auto& e : events) out.push_back(e.kind);
  return out;
}

Trace render(const PressScript& s, double noise = 0.0, std::uint64_t seed = 0) {
  SensorModel m;
  m.noise_sigma_n = noise;
  return synthesize_trace(s, m, seed);
}

using K = EventKind;

}  // namespace

TEST(Detector, EmptyStreamGivesNothing) {
  Detector d;
  EXPECT_TRUE(d.end_of_stream().empty());
  EXPECT_TRUE(detect({}).empty());
}

TEST(Detector, SoftHoldEntersOnePressWithoutClassicalEvents) {
  PressScript s;
  s.then(Segment::soft_hold(2000, 0.8));
  const auto ev = detect(render(s));
  ASSERT_EQ(kinds(ev), (std::vector{K::OnePressEnter, K::OnePressRelease}));
  // First sample above the release floor after smoothing is t=40 (raw 0.724).
  EXPECT_EQ(ev[0].t_ms, 540);
  EXPECT_EQ(ev[1].t_ms, 2000);  // last sample 1990 + one interval
}

TEST(Detector, FirmStrikeIsPassedThrough) {
  PressScript s;
  s.then(Segment::quick_strike(150, 2.0)).then(Segment::idle(200));
  const auto ev = detect(render(s));
  EXPECT_EQ(kinds(ev), (std::vector{K::ClassicalDepress, K::ClassicalRelease}));
  EXPECT_LT(ev[0].t_ms, ev[1].t_ms);
}

TEST(Detector, QuickSoftTapEmitsPairOnRelease) {
  PressScript s;
  s.then(Segment::soft_hold(200, 0.8)).then(Segment::idle(200));
  const auto ev = detect(render(s));
  ASSERT_EQ(kinds(ev), (std::vector{K::ClassicalDepress, K::ClassicalRelease}));
  EXPECT_EQ(ev[0].t_ms, ev[1].t_ms);
}

TEST(Detector, MediumThenHardPeak) {
  PressScript s;
  s.then(Segment::soft_hold(700, 0.8)).then(Segment::peak(400, 1.6)).then(Segment::peak(400, 2.4));
  s.then(Segment::idle(200));
  const auto ev = detect(render(s));
  ASSERT_EQ(kinds(ev), (std::vector{K::OnePressEnter, K::MediumRepeat, K::HardRepeat, K::OnePressRelease}));

  // Hand evaluation: raw apices at 800 and 1200 ms; the 3-sample trailing
  // average peaks one sample later over the symmetric neighbours apex-10,
  // apex, apex+10, each 10 ms off a 100 ms raised-cosine ramp.
  const double near = (1.0 - std::cos(0.9 * std::numbers::pi)) / 2.0;
  const double medium = 0.8 + 0.8 * (2.0 * near + 1.0) / 3.0;
  const double hard = 0.8 + 1.6 * (2.0 * near + 1.0) / 3.0;
  EXPECT_EQ(ev[0].t_ms, 540);
  EXPECT_EQ(ev[1].t_ms, 810);
  EXPECT_NEAR(*ev[1].apex_n, medium, 1e-9);
  EXPECT_EQ(ev[2].t_ms, 1210);
  EXPECT_NEAR(*ev[2].apex_n, hard, 1e-9);
  EXPECT_EQ(ev[3].t_ms, 1530);  // raw 0 from 1510, window clear at 1530
  EXPECT_FALSE(ev[0].apex_n);
  EXPECT_FALSE(ev[3].apex_n);

  const auto ref = testkit::reference_detect(render(s));
  EXPECT_EQ(ref.at("space"), ev);
}

TEST(Detector, SubThresholdWiggleIsSilent) {
  PressScript s;
  s.then(Segment::soft_hold(700, 0.8)).then(Segment::peak(400, 1.1)).then(Segment::idle(200));
  EXPECT_EQ(kinds(detect(render(s))), (std::vector{K::OnePressEnter, K::OnePressRelease}));
}

TEST(Detector, ApexAboveCeilingReportsCeiling) {
  DetectorConfig cfg;
  cfg.usable_ceiling_n = 2.5;
  PressScript s;
  s.then(Segment::soft_hold(700, 0.8)).then(Segment::peak(400, 2.95)).then(Segment::idle(200));
  const auto ev = detect(render(s), cfg);
  ASSERT_EQ(kinds(ev), (std::vector{K::OnePressEnter, K::HardRepeat, K::OnePressRelease}));
  EXPECT_EQ(*ev[1].apex_n, 2.5);
}

TEST(Detector, FirmPlateauInOnePressClassifiesOnceAtApex) {
  // Press firmly and keep holding: one event at the apex, nothing on the plateau.
  PressScript s;
  s.then(Segment::soft_hold(700, 0.8)).then(Segment::soft_hold(1500, 2.5)).then(Segment::idle(200));
  EXPECT_EQ(kinds(detect(render(s))), (std::vector{K::OnePressEnter, K::HardRepeat, K::OnePressRelease}));
}

TEST(Detector, RefractorySuppressesCloseSecondPeak) {
  DetectorConfig cfg;
  cfg.refractory_ms = 400;
  PressScript s;
  s.then(Segment::soft_hold(700, 0.8));
  auto p = Segment::peak(120, 1.6);
  p.rise_ms = 60;
  p.fall_ms = 60;
  s.then(p).then(p).then(Segment::soft_hold(300, 0.8)).then(Segment::idle(200));
  const auto ev = detect(render(s), cfg);
  EXPECT_EQ(kinds(ev), (std::vector{K::OnePressEnter, K::MediumRepeat, K::OnePressRelease}));
  EXPECT_EQ(kinds(detect(render(s))),
            (std::vector{K::OnePressEnter, K::MediumRepeat, K::MediumRepeat, K::OnePressRelease}));
}

TEST(Detector, StrikeAfterTimeoutDoesNotSplitCycle) {
  // Once in one-press mode, pressing hard is a peak, never a classical event.
  PressScript s;
  s.then(Segment::soft_hold(600, 0.8)).then(Segment::peak(300, 2.8)).then(Segment::idle(100));
  s.then(Segment::quick_strike(150, 2.8)).then(Segment::idle(100));
  EXPECT_EQ(kinds(detect(render(s))), (std::vector{K::OnePressEnter, K::HardRepeat, K::OnePressRelease,
                                                   K::ClassicalDepress, K::ClassicalRelease}));
}

TEST(Detector, NonMonotonicSampleRejectedWithoutStateChange) {
  Detector d;
  d.feed({0, "a", 0.8});
  d.feed({10, "a", 0.8});
  EXPECT_EQ(d.phase("a"), Phase::Contact);
  EXPECT_THROW(d.feed({10, "a", 0.0}), NonMonotonicSample);
  EXPECT_THROW(d.feed({5, "a", 0.0}), NonMonotonicSample);
  EXPECT_EQ(d.phase("a"), Phase::Contact);
  // Other keys keep their own clocks.
  EXPECT_NO_THROW(d.feed({0, "b", 0.0}));
  EXPECT_THROW(d.feed({20, "a", -1.0}), DataError);
}

TEST(Detector, UnknownKeyStartsIdle) {
  Detector d;
  EXPECT_EQ(d.phase("nope"), Phase::Idle);
  EXPECT_TRUE(d.feed({0, "nope", 0.0}).empty());
}

TEST(Detector, RejectsInconsistentConfig) {
  DetectorConfig c;
  c.hard_min_apex_n = 1.0;
  EXPECT_THROW(Detector{c}, DataError);
  c = {};
  c.release_floor_n = 0.7;
  EXPECT_THROW(Detector{c}, DataError);
  c = {};
  c.smooth_window_samples = 0;
  EXPECT_THROW(Detector{c}, DataError);
  c = {};
  c.hold_timeout_ms = 0;
  EXPECT_THROW(Detector{c}, DataError);
}

TEST(ClassifyApex, Bands) {
  const DetectorConfig cfg;
  EXPECT_EQ(classify_apex(1.6, cfg), ApexClass::Medium);
  EXPECT_EQ(classify_apex(2.5, cfg), ApexClass::Hard);
  EXPECT_EQ(classify_apex(0.5, cfg), ApexClass::None);
  EXPECT_EQ(classify_apex(1.2, cfg), ApexClass::Medium);
  EXPECT_EQ(classify_apex(2.0, cfg), ApexClass::Hard);
  EXPECT_EQ(classify_apex(0.0, cfg), ApexClass::None);
}

TEST(ClassifyApex, MonotoneInApex) {
  const DetectorConfig cfg;
  ApexClass prev = ApexClass::None;
  for (double a = 0.0; a <= 4.0; a += 0.001) {
    const auto c = classify_apex(a, cfg);
    ASSERT_GE(static_cast<int>(c), static_cast<int>(prev)) << a;
    prev = c;
  }
}

TEST(EndOfStream, ClosesEachPhase) {
  {
    Detector d;
    for (std::int64_t t = 0; t <= 600; t += 10) d.feed({t, "k", 0.8});
    ASSERT_EQ(d.phase("k"), Phase::OnePress);
    const auto ev = d.end_of_stream();
    ASSERT_EQ(kinds(ev), (std::vector{K::OnePressRelease}));
    EXPECT_EQ(ev[0].t_ms, 610);
    EXPECT_EQ(d.phase("k"), Phase::Idle);
  }
  {
    Detector d;
    for (std::int64_t t = 0; t <= 100; t += 10) d.feed({t, "k", 2.0});
    ASSERT_EQ(d.phase("k"), Phase::ClassicalDown);
    EXPECT_EQ(kinds(d.end_of_stream()), (std::vector{K::ClassicalRelease}));
  }
  {
    Detector d;
    d.feed({0, "k", 0.8});
    ASSERT_EQ(d.phase("k"), Phase::Contact);
    const auto ev = d.end_of_stream();
    EXPECT_EQ(kinds(ev), (std::vector{K::ClassicalDepress, K::ClassicalRelease}));
    EXPECT_EQ(ev[0].t_ms, 10);  // single sample: default 10 ms interval
  }
  {
    Detector d;
    d.feed({0, "k", 0.0});
    EXPECT_TRUE(d.end_of_stream().empty());
  }
}

TEST(EndOfStream, CommitsPendingPeak) {
  PressScript s;
  s.then(Segment::soft_hold(700, 0.8));
  auto rising = Segment::soft_hold(200, 2.4);
  rising.rise_ms = 200;
  s.then(rising);
  EXPECT_EQ(kinds(detect(render(s))), (std::vector{K::OnePressEnter, K::HardRepeat, K::OnePressRelease}));
}

TEST(DetectorProperty, InvariantsAndOracleOnRandomCorpus) {
  std::mt19937_64 rng(31);
  const DetectorConfig cfg;
  for (int i = 0; i < 300; ++i) {
    SensorModel m;
    m.noise_sigma_n = testkit::uniform(rng, 0.0, 0.08);
    const auto trace = synthesize_traces({testkit::random_script(rng, "space"), testkit::random_script(rng, "f4")},
                                         m, static_cast<std::uint64_t>(i));
    const auto events = detect(trace, cfg);
    const auto streamed = testkit::by_key(events);
    const auto reference = testkit::reference_detect(trace, cfg);
    for (const auto& [key, ref] : reference) {
      const auto it = streamed.find(key);
      const auto& got = it == streamed.end() ? std::vector<KeyEventRecord>{} : it->second;
      ASSERT_EQ(write_events(got), write_events(ref)) << "script " << i << " key " << key;
      testkit::InvariantReport report;
      testkit::check_event_invariants(got, cfg, report);
      ASSERT_EQ(report.violations, 0) << report.first;
    }
  }
}

TEST(DetectorProperty, ReplayIsDeterministic) {
  std::mt19937_64 rng(32);
  SensorModel m;
  m.noise_sigma_n = 0.05;
  for (int i = 0; i < 50; ++i) {
    const auto trace = synthesize_trace(testkit::random_script(rng), m, static_cast<std::uint64_t>(i));
    EXPECT_EQ(detect(trace), detect(trace));
  }
}
