// Security calculus against independently computed references: high-precision
// oracle routes for the AEP correction, Gaussian tail width and Holevo bound,
// frozen values for the calibrated operating points, and property tests for
// the estimator and bound identities.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mcqkd/security.hpp"
#include "oracles.hpp"

using namespace mcqkd;

namespace {

double rel(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

} // namespace

TEST_CASE("g vanishes at vacuum and grows with the eigenvalue") {
  CHECK(g_func(1.0) == 0.0);
  CHECK(g_func(1.0 + 5e-16) == 0.0);  // clamped against log(0) at the boundary
  double prev = 0.0;
  for (double nu : {1.01, 1.1, 1.5, 2.0, 5.0, 20.0}) {
    const double g = g_func(nu);
    CHECK(g > prev);
    prev = g;
  }
  // nu = 3 is the one-photon thermal state: 2*log2(2) - 1*log2(1) = 2
  CHECK(g_func(3.0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("snr and mutual information at the calibrated reference point") {
  const ChannelPoint p{3.8, 1.0, 0.0, 1.0, 0.0};
  CHECK(snr(p) == doctest::Approx(1.9).epsilon(1e-15));
  CHECK(mutual_information(p) ==
        doctest::Approx(1.5360529002402097).epsilon(1e-14));
  const ChannelPoint dark{0.0, 0.5, 0.01, 0.6, 0.1};
  CHECK(snr(dark) == 0.0);
  CHECK(mutual_information(dark) == 0.0);
}

TEST_CASE("mutual information is monotone in the channel parameters") {
  ChannelPoint p{4.0, 0.5, 0.02, 0.6, 0.1};
  const double base = mutual_information(p);
  ChannelPoint q = p;
  q.V_A = 5.0;
  CHECK(mutual_information(q) > base);
  q = p;
  q.xi = 0.2;
  CHECK(mutual_information(q) < base);
  q = p;
  q.T = 0.6;
  CHECK(mutual_information(q) > base);
}

TEST_CASE("holevo bound at a frozen reference point") {
  const ChannelPoint p{4.0, 0.5, 0.02, 1.0, 0.0};
  CHECK(holevo_bound(p) == doctest::Approx(0.682865744943213).epsilon(1e-13));
}

TEST_CASE("holevo bound matches the linear-algebra oracle") {
  std::mt19937_64 rng(0x686f6c65);
  std::uniform_real_distribution<double> uva(0.1, 20.0);
  std::uniform_real_distribution<double> ut(1e-3, 1.0);
  std::uniform_real_distribution<double> uxi(0.0, 0.5);
  std::uniform_real_distribution<double> ueta(0.1, 1.0);
  std::uniform_real_distribution<double> uvel(0.0, 0.5);
  for (int i = 0; i < 300; ++i) {
    const ChannelPoint p{uva(rng), ut(rng), uxi(rng), ueta(rng), uvel(rng)};
    const double lib = holevo_bound(p);
    const double ora = double(oracle::holevo_ld(p.V_A, p.eta * p.T, p.xi, p.v_el));
    CHECK(std::abs(lib - ora) <= 1e-8 * std::max(1.0, std::abs(ora)));
  }
}

TEST_CASE("holevo bound grows with excess noise") {
  ChannelPoint p{4.0, 0.5, 0.0, 0.6, 0.1};
  double prev = holevo_bound(p);
  for (double xi : {0.01, 0.05, 0.1, 0.3}) {
    p.xi = xi;
    const double chi = holevo_bound(p);
    CHECK(chi > prev);
    prev = chi;
  }
}

TEST_CASE("holevo bound is zero for a lossless noiseless channel") {
  // T = 1, xi = 0, eta = 1: Eve holds nothing.
  const ChannelPoint p{4.0, 1.0, 0.0, 1.0, 0.0};
  CHECK(holevo_bound(p) == doctest::Approx(0.0).epsilon(1e-9));
  // V_A = 0 sends vacuum; nothing to learn either.
  const ChannelPoint vac{0.0, 0.5, 0.0, 1.0, 0.0};
  CHECK(holevo_bound(vac) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("channel validation rejects unphysical parameters") {
  CHECK_THROWS_AS(validate(ChannelPoint{-1.0, 0.5, 0.0, 0.5, 0.0}),
                  std::domain_error);
  CHECK_THROWS_AS(validate(ChannelPoint{4.0, 0.0, 0.0, 0.5, 0.0}),
                  std::domain_error);
  CHECK_THROWS_AS(validate(ChannelPoint{4.0, 1.5, 0.0, 0.5, 0.0}),
                  std::domain_error);
  CHECK_THROWS_AS(validate(ChannelPoint{4.0, 0.5, -0.01, 0.5, 0.0}),
                  std::domain_error);
  CHECK_THROWS_AS(validate(ChannelPoint{4.0, 0.5, 0.0, 0.0, 0.0}),
                  std::domain_error);
  CHECK_THROWS_AS(validate(ChannelPoint{4.0, 0.5, 0.0, 0.5, -0.1}),
                  std::domain_error);
}

TEST_CASE("aep correction against the high-precision route") {
  CHECK(rel(aep_delta(1e-10, 8), 136.97533952380235) < 1e-9);
  for (double eps : {1e-6, 1e-8, 1e-10, 1e-12}) {
    for (int d : {1, 2, 8, 16}) {
      const double lib = aep_delta(eps, d);
      const double ora = double(oracle::aep_delta_ld(eps, d));
      CHECK(rel(lib, ora) < 1e-9);
    }
  }
  CHECK_THROWS_AS(aep_delta(0.0, 8), std::domain_error);
  CHECK_THROWS_AS(aep_delta(1.0, 8), std::domain_error);
  CHECK_THROWS_AS(aep_delta(1e-10, 0), std::domain_error);
}

TEST_CASE("tail width solves the gaussian tail equation") {
  const double w = pe_width(1e-10);
  CHECK(std::abs(w - 6.361340902404056) < 1e-9);
  CHECK(rel(0.5 * std::erfc(w / std::sqrt(2.0)), 1e-10) < 1e-6);
  for (double eps : {1e-3, 1e-6, 1e-10, 0.4}) {
    const double got = pe_width(eps);
    const double ora = double(oracle::gaussian_tail_width(eps));
    CHECK(std::abs(got - ora) < 1e-9);
  }
  CHECK_THROWS_AS(pe_width(0.0), std::domain_error);
  CHECK_THROWS_AS(pe_width(0.5), std::domain_error);
}

TEST_CASE("worst-case estimators at a frozen reference point") {
  const ChannelPoint p{4.0, 0.5, 0.02, 0.6, 0.1};
  const EstimatedChannel e = worst_case(0.5, 0.02, p, 1e9, 1e-10);
  CHECK(e.T_wc == doctest::Approx(0.49981156037486674).epsilon(1e-13));
  CHECK(e.xi_wc == doctest::Approx(0.021420238941724134).epsilon(1e-13));
  CHECK(e.w == pe_width(1e-10));
  CHECK(e.T_wc < e.T_hat);
  CHECK(e.xi_wc > e.xi_hat);
}

TEST_CASE("estimator spread shrinks as one over sqrt m") {
  const ChannelPoint p{4.0, 0.5, 0.02, 0.6, 0.1};
  const EstimatedChannel a = worst_case(0.5, 0.02, p, 1e8, 1e-10);
  const EstimatedChannel b = worst_case(0.5, 0.02, p, 4e8, 1e-10);
  CHECK(a.sigma_T / b.sigma_T == doctest::Approx(2.0).epsilon(1e-12));
  // sigma_xi also carries T_wc in its denominator, so the ratio is only
  // asymptotically 2; at these m the correction is far below the tolerance.
  CHECK(a.sigma_xi / b.sigma_xi == doctest::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("variance conventions order the confidence width") {
  const ChannelPoint p{4.0, 0.5, 0.02, 0.6, 0.1};
  const EstimatedChannel va = worst_case(0.5, 0.02, p, 1e9, 1e-10, PeVariance::va);
  const EstimatedChannel vp =
      worst_case(0.5, 0.02, p, 1e9, 1e-10, PeVariance::va_plus_1);
  CHECK(vp.sigma_T < va.sigma_T);
  CHECK(vp.T_wc > va.T_wc);
}

TEST_CASE("too small a block cannot bound the transmittance") {
  const ChannelPoint p{4.0, 0.5, 0.02, 0.6, 0.1};
  CHECK_THROWS_AS(worst_case(0.5, 0.02, p, 2.0, 1e-10), block_too_small);
  CHECK_THROWS_AS(worst_case(0.5, 0.02, p, 1.0, 1e-10), std::domain_error);
  CHECK_THROWS_AS(worst_case(0.0, 0.02, p, 1e9, 1e-10), std::domain_error);
  CHECK_THROWS_AS(worst_case(0.5, -0.1, p, 1e9, 1e-10), std::domain_error);
}

TEST_CASE("composable bounds at a frozen reference point") {
  SecurityParams sec;  // defaults: eps 1e-10 each, d 8, Nt 1e10, m 1e9, p_ec 0.97
  const ComposableBounds b = composable_skr(0.05, sec);
  CHECK(b.s_n == doctest::Approx(437005279.6570541).epsilon(1e-13));
  CHECK(b.r_lb == doctest::Approx(0.04238951202973425).epsilon(1e-13));
  CHECK(b.r_ub == doctest::Approx(0.04238951212673425).epsilon(1e-13));
  CHECK_FALSE(b.no_key);
}

TEST_CASE("upper and lower bounds differ by exactly one hashed bit") {
  std::mt19937_64 rng(0x626f756e);
  std::uniform_real_distribution<double> ur(1e-4, 1.0);
  std::uniform_real_distribution<double> unt(6.0, 12.0);
  std::uniform_real_distribution<double> uf(0.01, 0.9);
  std::uniform_real_distribution<double> up(0.5, 1.0);
  for (int i = 0; i < 1000; ++i) {
    SecurityParams sec;
    sec.block_size_Nt = std::pow(10.0, unt(rng));
    sec.pe_samples_m = uf(rng) * sec.block_size_Nt;
    sec.p_ec = up(rng);
    const ComposableBounds b = composable_skr(ur(rng), sec);
    CHECK(b.r_lb <= b.r_ub);
    const double gap = b.r_ub - b.r_lb;
    const double want = sec.p_ec / sec.block_size_Nt;
    // bounds are ~1e8 ulp above the gap, so the identity holds to additive
    // rounding of the two divisions
    const double tol =
        8.0 * 2.220446049250313e-16 * std::max(std::abs(b.r_ub), std::abs(b.r_lb));
    CHECK(std::abs(gap - want) <= tol);
  }
}

TEST_CASE("no key when the finite-size terms eat the raw rate") {
  SecurityParams sec;
  const ComposableBounds b = composable_skr(0.0, sec);
  CHECK(b.no_key);
  CHECK(b.r_lb < 0.0);
  // barely positive asymptotic rate, still below the sqrt(n) penalty
  const ComposableBounds c = composable_skr(1e-6, sec);
  CHECK(c.no_key);
}

TEST_CASE("composable bound rejects inconsistent accounting") {
  SecurityParams sec;
  sec.pe_samples_m = sec.block_size_Nt;
  CHECK_THROWS_AS(composable_skr(0.05, sec), std::domain_error);
  sec = SecurityParams{};
  sec.p_ec = 0.0;
  CHECK_THROWS_AS(composable_skr(0.05, sec), std::domain_error);
  sec = SecurityParams{};
  sec.block_size_Nt = 0.0;
  CHECK_THROWS_AS(composable_skr(0.05, sec), std::domain_error);
}

TEST_CASE("total failure budget is the exact sum") {
  SecurityParams sec;  // all epsilons 1e-10
  CHECK(total_epsilon(sec) == 5e-10);
  sec.eps_pe = 2e-10;
  CHECK(total_epsilon(sec) == doctest::Approx(7e-10).epsilon(1e-15));
  sec.eps_s = 0.0;
  CHECK_THROWS_AS(total_epsilon(sec), std::domain_error);
}

TEST_CASE("asymptotic rate uses the estimate for i and the worst case for chi") {
  const ChannelPoint p{4.0, 0.5, 0.02, 0.6, 0.1};
  const EstimatedChannel e = worst_case(0.5, 0.02, p, 1e9, 1e-10);
  const double r = asymptotic_skr(0.95, p, e);
  ChannelPoint est = p;
  est.T = e.T_hat;
  est.xi = e.xi_hat;
  ChannelPoint worst = p;
  worst.T = e.T_wc;
  worst.xi = e.xi_wc;
  CHECK(r == doctest::Approx(0.95 * mutual_information(est) -
                             holevo_bound(worst)).epsilon(1e-14));
  CHECK_THROWS_AS(asymptotic_skr(0.0, p, e), std::domain_error);
  CHECK_THROWS_AS(asymptotic_skr(1.5, p, e), std::domain_error);
}
