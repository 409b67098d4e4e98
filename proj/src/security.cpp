#include "mcqkd/security.hpp"

#include <cmath>

namespace mcqkd {

void validate(const ChannelPoint& p) {
  if (!(p.V_A >= 0.0)) throw std::domain_error("V_A must be >= 0");
  if (!(p.xi >= 0.0)) throw std::domain_error("xi must be >= 0");
  if (!(p.v_el >= 0.0)) throw std::domain_error("v_el must be >= 0");
  if (!(p.T > 0.0 && p.T <= 1.0)) throw std::domain_error("T must be in (0,1]");
  if (!(p.eta > 0.0 && p.eta <= 1.0)) throw std::domain_error("eta must be in (0,1]");
}

double g_func(double nu) {
  if (nu <= 1.0 + 1e-15) return 0.0;
  const double a = 0.5 * (nu + 1.0);
  const double b = 0.5 * (nu - 1.0);
  return a * std::log2(a) - b * std::log2(b);
}

double snr(const ChannelPoint& p) {
  validate(p);
  return p.eta * p.T * p.V_A / (2.0 + p.v_el + p.eta * p.T * p.xi);
}

double mutual_information(const ChannelPoint& p) {
  return std::log2(1.0 + snr(p));
}

double holevo_bound(const ChannelPoint& p) {
  validate(p);
  // Untrusted detection: efficiency folds into T_e = eta*T, electronic noise
  // rides as added output noise. Entanglement-based covariance with V = V_A+1.
  const double Te = p.eta * p.T;
  const double V = p.V_A + 1.0;
  const double a = V;
  const double b = Te * (V - 1.0 + p.xi) + 1.0 + p.v_el;
  const double c2 = Te * (V * V - 1.0);
  const double delta = a * a + b * b - 2.0 * c2;
  const double detg = (a * b - c2) * (a * b - c2);
  double disc = delta * delta - 4.0 * detg;
  if (disc < 0.0) disc = 0.0;  // rounding of a true double root
  const double root = std::sqrt(disc);
  const double nu1 = std::sqrt(0.5 * (delta + root));
  const double nu2 = std::sqrt(std::max(0.5 * (delta - root), 0.0));
  const double nu3 = a - c2 / (b + 1.0);
  for (double nu : {nu1, nu2, nu3}) {
    if (nu < 1.0 - kNuTol)
      throw std::domain_error("unphysical covariance: symplectic eigenvalue < 1");
  }
  const double chi = g_func(nu1) + g_func(nu2) - g_func(nu3);
  return chi > 0.0 ? chi : 0.0;
}

double aep_delta(double eps_s, int d) {
  if (!(eps_s > 0.0 && eps_s < 1.0)) throw std::domain_error("eps_s must be in (0,1)");
  if (d < 1) throw std::domain_error("d must be >= 1");
  // 1 - sqrt(1-x) evaluated as x/(1+sqrt(1-x)); the direct form underflows to
  // 0 for eps_s ~ 1e-10.
  const double x = eps_s * eps_s;
  const double inner = x / (1.0 + std::sqrt(1.0 - x));
  return 4.0 * std::log2(std::sqrt(std::exp2(double(d))) + 2.0) *
         std::sqrt(-std::log2(inner));
}

double pe_width(double eps_pe) {
  if (!(eps_pe > 0.0 && eps_pe < 0.5)) throw std::domain_error("eps_pe must be in (0,0.5)");
  // w solves 0.5*erfc(w/sqrt(2)) = eps_pe, i.e. w = sqrt(2)*erfinv(1-2*eps_pe).
  // Bisection on the monotone tail; 200 halvings exhaust double precision.
  double lo = 0.0, hi = 45.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double tail = 0.5 * std::erfc(mid / std::sqrt(2.0));
    if (tail > eps_pe)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

EstimatedChannel worst_case(double t_hat, double xi_hat, const ChannelPoint& p,
                            double m, double eps_pe, PeVariance conv) {
  if (!(m >= 2.0)) throw std::domain_error("m must be >= 2");
  if (!(t_hat > 0.0)) throw std::domain_error("T_hat must be > 0");
  if (!(xi_hat >= 0.0)) throw std::domain_error("xi_hat must be >= 0");
  validate(p);
  EstimatedChannel e;
  e.T_hat = t_hat;
  e.xi_hat = xi_hat;
  e.w = pe_width(eps_pe);
  const double V = conv == PeVariance::va ? p.V_A : p.V_A + 1.0;
  e.sigma_T = (2.0 * t_hat / std::sqrt(2.0 * m)) *
              std::sqrt((xi_hat + (2.0 + p.v_el) / (p.eta * t_hat)) / V);
  e.T_wc = t_hat - e.w * e.sigma_T;
  if (e.T_wc <= 0.0) throw block_too_small();
  // sigma_xi uses the already-bounded T_wc in its denominator.
  e.sigma_xi = (1.0 / std::sqrt(m)) * (p.eta * t_hat * xi_hat + p.v_el + 2.0) /
               (p.eta * e.T_wc);
  e.xi_wc = (t_hat / e.T_wc) * xi_hat + e.w * e.sigma_xi;
  return e;
}

double asymptotic_skr(double beta, const ChannelPoint& p_est,
                      const EstimatedChannel& wc) {
  if (!(beta > 0.0 && beta <= 1.0)) throw std::domain_error("beta must be in (0,1]");
  ChannelPoint est = p_est;
  est.T = wc.T_hat;
  est.xi = wc.xi_hat;
  ChannelPoint worst = p_est;
  worst.T = wc.T_wc;
  worst.xi = wc.xi_wc;
  return beta * mutual_information(est) - holevo_bound(worst);
}

ComposableBounds composable_skr(double r_inf, const SecurityParams& sec) {
  if (!(sec.block_size_Nt > 0.0)) throw std::domain_error("block_size_Nt must be > 0");
  if (!(sec.pe_samples_m > 0.0 && sec.pe_samples_m < sec.block_size_Nt))
    throw std::domain_error("pe_samples_m must be in (0, block_size_Nt)");
  if (!(sec.p_ec > 0.0 && sec.p_ec <= 1.0)) throw std::domain_error("p_ec must be in (0,1]");
  const double n = sec.block_size_Nt - sec.pe_samples_m;
  const double s_n = n * r_inf - std::sqrt(n) * aep_delta(sec.eps_s, sec.d) +
                     std::log2(2.0 * sec.eps_h * sec.eps_h * sec.eps_cor);
  ComposableBounds b;
  b.s_n = s_n;
  b.r_ub = sec.p_ec * s_n / sec.block_size_Nt;
  b.r_lb = sec.p_ec * (s_n - 1.0) / sec.block_size_Nt;
  b.no_key = !(b.r_lb > 0.0);
  return b;
}

double total_epsilon(const SecurityParams& sec) {
  for (double e : {sec.eps_s, sec.eps_h, sec.eps_cor, sec.eps_pe}) {
    if (!(e > 0.0 && e < 1.0)) throw std::domain_error("epsilons must be in (0,1)");
  }
  return sec.eps_cor + sec.eps_s + sec.eps_h + 2.0 * sec.eps_pe;
}

} // namespace mcqkd
