#include "mcqkd/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace mcqkd {

double FiberModel::transmittance() const {
  if (loss_db < 0.0) throw std::domain_error("loss_db must be >= 0");
  return std::pow(10.0, -loss_db / 10.0);
}

double dispersion_noise(double f_sym_ghz, double length_km, const FiberModel& fiber) {
  if (f_sym_ghz < 0.0 || length_km < 0.0)
    throw std::domain_error("dispersion_noise: negative rate or length");
  const double f2 = f_sym_ghz * f_sym_ghz;
  return fiber.kappa_disp * f2 * f2 * length_km * length_km;
}

double ici_noise(int N, double combined_linewidth_hz, double f_sub_ghz,
                 const NoiseConfig& cfg) {
  if (N < 1) throw std::domain_error("N must be >= 1");
  if (N == 1) return 0.0;
  return cfg.c_ici * double(N - 1) * (combined_linewidth_hz / (f_sub_ghz * 1e9));
}

double id_noise(int N, double va, const NoiseConfig& cfg) {
  if (N < 1) throw std::domain_error("N must be >= 1");
  if (N == 1) return 0.0;
  return cfg.c_id * double(N - 1) * double(N - 1) * va;
}

NoiseBudget total_excess(int k, const ExcessConfig& cfg) {
  if (cfg.N < 1) throw std::domain_error("N must be >= 1");
  if (k < 0 || k >= cfg.N) throw std::domain_error("subcarrier index out of range");
  const double f_sub = cfg.f_sym_ghz / double(cfg.N);
  NoiseBudget b;
  b.k = k;
  b.eps_rin = cfg.noise.rin;
  b.eps_dac = cfg.noise.dac;
  b.eps_le = cfg.noise.leakage;
  b.eps_mod = cfg.noise.mod_er + cfg.noise.mod_iq +
              id_noise(cfg.N, cfg.noise.va_ref, cfg.noise);
  b.eps_phase = dispersion_noise(f_sub, cfg.fiber.length_km, cfg.fiber) +
                cfg.noise.pnc_residual +
                ici_noise(cfg.N, cfg.noise.combined_linewidth_hz, f_sub, cfg.noise);
  return b;
}

} // namespace mcqkd
