#pragma once
// Parametric excess-noise budget per subcarrier: intensity/DAC/leakage floors,
// modulation terms (finite ER, IQ imbalance, intermodulation), and phase terms
// (residual dispersion, residual carrier-phase error, inter-carrier
// interference). All values are channel-referred SNU.

#include <cstddef>
#include <vector>

namespace mcqkd {

struct FiberModel {
  double length_km = 50.0;
  double loss_db = 9.5;  // total for the scenario, not per km
  double attenuation_db_per_km = 0.19;
  double dispersion_ps_nm_km = 17.0;
  // Dispersion-noise constant of the kappa * f^4 * L^2 model (f in GHz, L in
  // km), anchored so that (10 GHz, 50 km) -> 0.0294 SNU.
  double kappa_disp = 0.0294 / (1e4 * 2500.0);

  double transmittance() const;
};

struct NoiseConfig {
  double rin = 0.004;
  double dac = 0.006;
  double leakage = 0.004;
  double mod_er = 0.004;        // finite extinction ratio
  double mod_iq = 0.004;        // IQ imbalance
  double pnc_residual = 0.007;  // residual CPE after both PNC stages
  double c_ici = 10.0;          // * (N-1) * linewidth/f_sub
  double c_id = 1.5e-6;         // * (N-1)^2 * V_A
  double combined_linewidth_hz = 200.0;
  double va_ref = 3.8;  // operating point for the intermodulation term
};

struct NoiseBudget {
  double eps_rin = 0.0;
  double eps_dac = 0.0;
  double eps_le = 0.0;
  double eps_mod = 0.0;    // finite ER + IQ imbalance + intermodulation
  double eps_phase = 0.0;  // dispersion + residual CPE + ICI
  int k = 0;

  double total() const {
    return eps_rin + eps_dac + eps_le + eps_mod + eps_phase;
  }
};

struct ExcessConfig {
  int N = 5;
  double f_sym_ghz = 10.0;
  FiberModel fiber;
  NoiseConfig noise;
};

double dispersion_noise(double f_sym_ghz, double length_km, const FiberModel& fiber);
double ici_noise(int N, double combined_linewidth_hz, double f_sub_ghz,
                 const NoiseConfig& cfg);
double id_noise(int N, double va, const NoiseConfig& cfg);
NoiseBudget total_excess(int k, const ExcessConfig& cfg);

} // namespace mcqkd
