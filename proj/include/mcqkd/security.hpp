#pragma once
// Composable security calculus for Gaussian-modulated coherent-state CV-QKD
// with heterodyne detection, collective attacks, untrusted detector loss.
// Everything here is a pure function; all variances are in shot-noise units.

#include <stdexcept>

namespace mcqkd {

// Per-block security accounting. Counts are carried as doubles (exact for
// integers below 2^53, and block sizes of 1e10..1e12 are routine).
struct SecurityParams {
  double eps_s = 1e-10;    // smoothing
  double eps_h = 1e-10;    // hashing / PA
  double eps_cor = 1e-10;  // correctness
  double eps_pe = 1e-10;   // parameter estimation
  int d = 8;               // ADC bits per raw-key sample
  double block_size_Nt = 1e10;
  double pe_samples_m = 1e9;
  double p_ec = 0.97;      // EC success probability, 1 - FER
};

struct ChannelPoint {
  double V_A;   // modulation variance
  double T;     // channel transmittance, (0,1]
  double xi;    // channel-referred excess noise
  double eta;   // detector efficiency, (0,1]
  double v_el;  // electronic noise, channel-referred at detector output
};

struct EstimatedChannel {
  double T_hat = 0.0;
  double xi_hat = 0.0;
  double sigma_T = 0.0;
  double sigma_xi = 0.0;
  double w = 0.0;
  double T_wc = 0.0;
  double xi_wc = 0.0;
};

struct ComposableBounds {
  double s_n;   // extractable bits for the block; may be <= 0
  double r_lb;  // bits/symbol over the whole block
  double r_ub;
  bool no_key;  // set when the block cannot yield even one secure bit
};

// Assembled per-subcarrier report; skr fields are filled by callers that know
// the symbol rate. chi is evaluated at the worst-case point (r_inf = beta*I - chi).
struct KeyRateReport {
  double I = 0.0;
  double chi = 0.0;
  double r_inf = 0.0;
  double s_n = 0.0;
  double r_lb = 0.0;
  double r_ub = 0.0;
  double skr_bps = 0.0;
  bool no_key = false;
};

struct block_too_small : std::runtime_error {
  block_too_small() : std::runtime_error(
      "block too small: T_wc <= 0, m insufficient for the requested eps_pe") {}
};

// PE spread convention: the V dividing sigma_T.
enum class PeVariance { va, va_plus_1 };

void validate(const ChannelPoint& p);  // throws std::domain_error

double g_func(double nu);
double snr(const ChannelPoint& p);
double mutual_information(const ChannelPoint& p);

// Symplectic-eigenvalue tolerance: eigenvalues below 1 - kNuTol are treated as
// an unphysical covariance matrix and rejected.
inline constexpr double kNuTol = 1e-9;
double holevo_bound(const ChannelPoint& p);

double aep_delta(double eps_s, int d);

// Two-sided Gaussian confidence width: P(|Z| > w) = 2*eps_pe.
double pe_width(double eps_pe);

EstimatedChannel worst_case(double t_hat, double xi_hat, const ChannelPoint& p,
                            double m, double eps_pe,
                            PeVariance conv = PeVariance::va);

// beta*I at the estimated point minus chi at the worst-case point.
double asymptotic_skr(double beta, const ChannelPoint& p_est,
                      const EstimatedChannel& wc);

ComposableBounds composable_skr(double r_inf, const SecurityParams& sec);

double total_epsilon(const SecurityParams& sec);

} // namespace mcqkd
