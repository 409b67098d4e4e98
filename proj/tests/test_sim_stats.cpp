// Statistical behaviour of the end-to-end simulator: estimator bias and
// spread, 1/sqrt(m) convergence, carrier-recovery ordering, superimposed
// sync gain, calibration unit, and drift tracking. Each case fixes its
// seeds; bounds are sized so pass/fail is driven by the mechanism under
// test, not by the luck of one run.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "mcqkd/scenario.hpp"
#include "mcqkd/sim/run.hpp"

using mcqkd::Scenario;
using mcqkd::scenario_from_json;
using mcqkd::sim::run_simulation;
using mcqkd::sim::SimReport;
using doctest::Approx;

namespace {

// Noise-free channel apart from what the caller re-enables.
Scenario clean_channel(double loss_db, double length_km) {
  Scenario s = scenario_from_json("{}");
  s.fiber.length_km = length_km;
  s.fiber.loss_db = loss_db;
  s.detector.quantization = false;
  s.imp.phase_noise = false;
  s.imp.dispersion = false;
  s.imp.channel_noise = false;
  return s;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / double(v.size());
}

double std_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / double(v.size() - 1));
}

// Per-subcarrier std over seeds, RMS-pooled across subcarriers. Removes any
// fixed per-subcarrier offset so only the run-to-run scatter is measured.
double pooled_spread(const std::vector<std::vector<double>>& by_k) {
  double acc = 0.0;
  for (const auto& col : by_k) {
    const double s = std_of(col);
    acc += s * s;
  }
  return std::sqrt(acc / double(by_k.size()));
}

} // namespace

TEST_CASE("null channel: excess-noise estimates scatter around zero") {
  Scenario s = clean_channel(0.0, 0.0);
  s.detector.shot_noise = true;

  const int kSeeds = 60;
  const int kBlocks = 4;
  std::vector<double> xi;
  std::vector<double> t;
  for (int i = 0; i < kSeeds; ++i) {
    const SimReport rep = run_simulation(s, 9000 + std::uint64_t(i), kBlocks);
    REQUIRE(rep.blocks_used == kBlocks);
    REQUIRE(rep.calibrated);
    for (const auto& sub : rep.sub) {
      xi.push_back(sub.xi_hat);
      t.push_back(sub.t_hat);
    }
  }

  // per-sample scatter of t_hat at this m is about 5 percent; the band is a
  // five-sigma fence around it
  for (double v : t) CHECK(std::abs(v - 1.0) < 0.25);
  CHECK(std::abs(mean_of(t) - 1.0) < 0.02);

  const double m = mean_of(xi);
  const double sd = std_of(xi);
  const double se = sd / std::sqrt(double(xi.size()));
  // 3.2 sigma on the empirical scatter, plus a floor for the
  // calibration-noise component shared by the five estimates of one run.
  CHECK(std::abs(m) <= 3.2 * se + 0.005);

  int inside = 0;
  double worst = 0.0;
  for (double v : xi) {
    if (std::abs(v) < 3.0 * sd) ++inside;
    worst = std::max(worst, std::abs(v));
  }
  CHECK(double(inside) / double(xi.size()) >= 0.9);
  CHECK(worst < 6.0 * sd);
}

TEST_CASE("injected excess noise is recovered through a noiseless chain") {
  Scenario s = clean_channel(3.0, 15.0);
  s.detector.shot_noise = false;
  s.imp.channel_noise = true;
  s.imp.xi_inject = 0.03;

  const int kSeeds = 12;
  const int kBlocks = 16;
  std::vector<double> xi;
  for (int i = 0; i < kSeeds; ++i) {
    const SimReport rep = run_simulation(s, 4200 + std::uint64_t(i), kBlocks);
    REQUIRE(rep.blocks_used == kBlocks);
    for (const auto& sub : rep.sub) {
      CHECK(sub.t_hat > 0.49);
      CHECK(sub.t_hat < 0.51);
      CHECK(std::abs(sub.xi_hat - 0.03) < 0.01);
      xi.push_back(sub.xi_hat);
    }
  }
  CHECK(std::abs(mean_of(xi) - 0.03) < 0.002);
}

TEST_CASE("injected excess noise under shot noise stays inside the "
          "parameter-estimation spread") {
  Scenario s = clean_channel(3.0, 15.0);
  s.detector.shot_noise = true;
  s.imp.channel_noise = true;
  s.imp.xi_inject = 0.03;

  const int kSeeds = 40;
  const int kBlocks = 8;
  std::vector<double> xi;
  std::size_t m_pairs = 0;
  double t_sum = 0.0;
  for (int i = 0; i < kSeeds; ++i) {
    const SimReport rep = run_simulation(s, 5700 + std::uint64_t(i), kBlocks);
    REQUIRE(rep.blocks_used == kBlocks);
    for (const auto& sub : rep.sub) {
      xi.push_back(sub.xi_hat);
      m_pairs = sub.m;
      t_sum += sub.t_hat;
    }
  }

  const double eta = s.detector.eta;
  const double t_bar = t_sum / double(xi.size());
  const double sigma_xi =
      (eta * t_bar * 0.03 + 2.0 + s.detector.v_el) /
      (eta * t_bar * std::sqrt(double(m_pairs)));

  int inside = 0;
  for (double v : xi)
    if (std::abs(v - 0.03) < 3.0 * sigma_xi) ++inside;
  CHECK(double(inside) / double(xi.size()) >= 0.9);

  const double se = std_of(xi) / std::sqrt(double(xi.size()));
  CHECK(std::abs(mean_of(xi) - 0.03) <= 3.2 * se + 0.005);
}

TEST_CASE("estimator spread shrinks as one over sqrt m") {
  Scenario s = clean_channel(3.0, 15.0);
  s.detector.shot_noise = false;
  s.imp.channel_noise = true;
  s.imp.xi_inject = 0.03;
  s.sim.calib_blocks = 1;

  const int kN = int(s.tx.N);
  // 320 key frames per block and subcarrier: 32 blocks ~ 1e4 pairs,
  // 3125 blocks = 1e6 exactly.
  const int kSmallBlocks = 32;
  const int kBigBlocks = 3125;
  const int kSmallSeeds = 16;
  const int kBigSeeds = 8;

  std::vector<std::vector<double>> small_by_k(kN), big_by_k(kN);
  std::size_t m_small = 0, m_big = 0;
  for (int i = 0; i < kSmallSeeds; ++i) {
    const SimReport rep = run_simulation(s, 300 + std::uint64_t(i), kSmallBlocks);
    REQUIRE(rep.blocks_used == kSmallBlocks);
    for (int k = 0; k < kN; ++k) {
      small_by_k[std::size_t(k)].push_back(rep.sub[std::size_t(k)].xi_hat);
      m_small = rep.sub[std::size_t(k)].m;
    }
  }
  for (int i = 0; i < kBigSeeds; ++i) {
    const SimReport rep = run_simulation(s, 800 + std::uint64_t(i), kBigBlocks);
    REQUIRE(rep.blocks_used == kBigBlocks);
    for (int k = 0; k < kN; ++k) {
      big_by_k[std::size_t(k)].push_back(rep.sub[std::size_t(k)].xi_hat);
      m_big = rep.sub[std::size_t(k)].m;
    }
  }

  REQUIRE(m_small == std::size_t(320 * kSmallBlocks));
  REQUIRE(m_big == std::size_t(320 * kBigBlocks));

  const double spread_small = pooled_spread(small_by_k);
  const double spread_big = pooled_spread(big_by_k);
  const double expected = std::sqrt(double(m_big) / double(m_small));

  CHECK(spread_small > 0.0);
  CHECK(spread_big > 0.0);
  const double ratio = spread_small / spread_big;
  CHECK(ratio > 0.7 * expected);
  CHECK(ratio < 1.3 * expected);

  std::vector<double> small_all, big_all;
  for (const auto& c : small_by_k) small_all.insert(small_all.end(), c.begin(), c.end());
  for (const auto& c : big_by_k) big_all.insert(big_all.end(), c.begin(), c.end());
  CHECK(std::abs(mean_of(small_all) - 0.03) < 0.003);
  CHECK(std::abs(mean_of(big_all) - 0.03) < 0.001);
}

TEST_CASE("carrier recovery removes most of the laser phase-noise penalty") {
  Scenario s = clean_channel(3.0, 15.0);
  s.detector.shot_noise = true;
  s.imp.phase_noise = true;
  s.imp.linewidth_a_hz = 50e3;
  s.imp.linewidth_b_hz = 50e3;
  s.sim.m_superimpose = 1;  // per-block sync keeps groups trivially coherent

  const int kSeeds = 8;
  const int kBlocks = 8;
  int wins = 0;
  std::vector<double> on_means, off_means;
  for (int i = 0; i < kSeeds; ++i) {
    Scenario on = s;
    Scenario off = s;
    off.sim.pnc_fast = false;
    off.sim.pnc_slow = false;
    const std::uint64_t seed = 6600 + std::uint64_t(i);
    const SimReport rep_on = run_simulation(on, seed, kBlocks);
    const SimReport rep_off = run_simulation(off, seed, kBlocks);
    REQUIRE(rep_on.blocks_used > 0);
    REQUIRE(rep_off.blocks_used > 0);
    std::vector<double> a, b;
    for (const auto& sub : rep_on.sub) a.push_back(sub.xi_hat);
    for (const auto& sub : rep_off.sub) b.push_back(sub.xi_hat);
    on_means.push_back(mean_of(a));
    off_means.push_back(mean_of(b));
    if (on_means.back() < off_means.back()) ++wins;
  }
  CHECK(wins >= 7);
  CHECK(mean_of(on_means) < mean_of(off_means) - 0.02);
}

TEST_CASE("superimposed training rescues synchronization at high loss") {
  Scenario base = scenario_from_json("{}");
  base = at_distance(base, 50.0);  // 9.5 dB total

  const int kSeeds = 6;
  const int kBlocks = 8;
  int failures_single = 0;
  std::vector<double> t_grouped;
  for (int i = 0; i < kSeeds; ++i) {
    Scenario single = base;
    single.sim.m_superimpose = 1;
    Scenario grouped = base;
    grouped.sim.m_superimpose = 16;
    const std::uint64_t seed = 7700 + std::uint64_t(i);

    const SimReport rep_single = run_simulation(single, seed, kBlocks);
    failures_single += rep_single.sync_failures;

    const SimReport rep_grouped = run_simulation(grouped, seed, kBlocks);
    CHECK(rep_grouped.sync_failures == 0);
    REQUIRE(rep_grouped.blocks_used == kBlocks);
    for (const auto& sub : rep_grouped.sub) t_grouped.push_back(sub.t_hat);
  }
  CHECK(failures_single > 0);
  const double t_bar = mean_of(t_grouped);
  CHECK(t_bar > 0.10);
  CHECK(t_bar < 0.125);
}

TEST_CASE("calibration reports two shot-noise units per complex sample") {
  Scenario s = clean_channel(3.0, 15.0);
  s.detector.shot_noise = true;

  const SimReport vac = run_simulation(s, 1234, 4);
  REQUIRE(vac.calibrated);
  CHECK(vac.snu_unit_mean > 1.9);
  CHECK(vac.snu_unit_mean < 2.1);

  Scenario noisy = s;
  noisy.detector.v_el = 0.2;
  const SimReport el = run_simulation(noisy, 1234, 4);
  REQUIRE(el.calibrated);
  // per-quadrature variance 1 + v_el/2, so the unit grows by the same factor
  CHECK(el.snu_unit_mean / vac.snu_unit_mean == Approx(1.1).epsilon(0.02));
}

TEST_CASE("real-time recalibration tracks detector gain drift") {
  Scenario s = clean_channel(3.0, 15.0);
  s.detector.shot_noise = true;
  s.detector.gain_drift = 0.05;
  s.sim.m_superimpose = 8;

  const int kBlocks = 48;  // six groups of eight

  // Per-group t_hat carries roughly 3 percent scatter at this group size, so
  // the ramp is read from five seeds and compared between the two modes.
  std::vector<double> ramp_once, ramp_live;
  int once_above = 0;
  for (int i = 0; i < 5; ++i) {
    const std::uint64_t seed = 31 + std::uint64_t(i);

    Scenario once = s;
    once.detector.one_time_calibration = true;
    const SimReport a = run_simulation(once, seed, kBlocks);
    REQUIRE(a.blocks_used == kBlocks);
    REQUIRE(a.t_hat_by_group.size() == 6);
    ramp_once.push_back(a.t_hat_by_group.back() / a.t_hat_by_group.front());

    Scenario live = s;
    live.detector.one_time_calibration = false;
    const SimReport b = run_simulation(live, seed, kBlocks);
    REQUIRE(b.t_hat_by_group.size() == 6);
    ramp_live.push_back(b.t_hat_by_group.back() / b.t_hat_by_group.front());

    if (ramp_once.back() > ramp_live.back()) ++once_above;
  }

  // a stale unit leaves the squared gain ramp in the group estimates:
  // (1.0426 / 0.9574)^2 = 1.186 end to end
  const double mo = mean_of(ramp_once);
  CHECK(mo > 1.10);
  CHECK(mo < 1.28);

  // per-group recalibration rebinds the unit and the ramp cancels
  const double ml = mean_of(ramp_live);
  CHECK(std::abs(ml - 1.0) < 0.06);
  CHECK(mo - 1.0 > 2.0 * std::abs(ml - 1.0));
  CHECK(once_above >= 4);
}
