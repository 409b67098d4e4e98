#pragma once
// Whole-run Monte-Carlo driver: per-block transmit -> channel -> detect ->
// demodulate, slow carrier tracking over superimposed training groups,
// shot-unit calibration against signal-off records, and pooled channel
// estimation. t_hat and xi_hat in the report are physical-parameter
// estimates: detection efficiency and chain gain are already folded out, so
// they feed the security calculus directly.

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mcqkd/scenario.hpp"

namespace mcqkd::sim {

struct SubcarrierResult {
  int k = 0;
  double t_hat = 0.0;
  double xi_hat = 0.0;       // channel-referred, SNU
  double sym_var_snu = 0.0;  // received second moment in calibrated units
  std::size_t m = 0;         // pooled key-symbol pairs
  std::complex<double> h;    // pooled raw-scale gain
};

struct SimReport {
  std::vector<SubcarrierResult> sub;
  // subcarrier-mean transmittance estimate per training group, each referred
  // with the calibration state current at that group (tracking diagnostics)
  std::vector<double> t_hat_by_group;
  int blocks_requested = 0;
  int blocks_used = 0;
  int sync_failures = 0;
  double snu_unit_mean = 0.0;  // mean per-quadrature unit, raw record scale
  bool calibrated = false;
  std::uint64_t seed = 0;
  double eta = 0.0;  // detector values the security feed should pair with
  double v_el = 0.0;
};

// Per-symbol consumer of the equalized constellation, training frames
// included; the CLI wires this to the raw-dump CSV writer.
class DumpSink {
 public:
  virtual ~DumpSink() = default;
  virtual void row(int block, int subcarrier, double i, double q,
                   bool is_ts) = 0;
};

struct sim_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Runs `blocks` signal blocks under the scenario's impairment and detector
// models. Throws config_error for grid-alignment violations and sim_error
// when no block survives synchronization.
SimReport run_simulation(const Scenario& sc, std::uint64_t seed, int blocks,
                         DumpSink* dump = nullptr);

} // namespace mcqkd::sim
