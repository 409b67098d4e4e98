#include "mcqkd/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mcqkd {

using json = nlohmann::json;

namespace {

// Field-path bookkeeping so type errors name the offending entry.
template <typename T>
void read(const json& j, const char* section, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw config_error(std::string(section) + "." + key + ": " + e.what());
  }
}

std::size_t line_of_offset(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

const json* section(const json& j, const char* key) {
  if (!j.contains(key)) return nullptr;
  if (!j.at(key).is_object())
    throw config_error(std::string(key) + ": expected an object");
  return &j.at(key);
}

} // namespace

double loss_for_distance(const Scenario& s, double length_km) {
  for (const auto& [d, loss] : s.loss_table_db) {
    if (std::abs(d - length_km) < 1e-9) return loss;
  }
  return s.fiber.attenuation_db_per_km * length_km;
}

Scenario at_distance(const Scenario& s, double length_km) {
  Scenario out = s;
  out.fiber.length_km = length_km;
  out.fiber.loss_db = loss_for_distance(s, length_km);
  return out;
}

OptimizationScenario to_optimization(const Scenario& s) {
  OptimizationScenario o;
  o.distance_km = s.fiber.length_km;
  o.fiber = s.fiber;
  o.eta = s.detector.eta;
  o.v_el = s.detector.v_el;
  o.security = s.security;
  o.noise = s.noise;
  o.f_sym_ghz = s.tx.f_sym_ghz;
  o.ts_fraction = s.tx.ts_fraction;
  o.n_fixed = s.tx.N;
  o.n_min = s.n_min;
  o.n_max = s.n_max;
  o.va_min = s.va_min;
  o.va_max = s.va_max;
  o.va_step = s.va_step;
  o.objective = s.objective;
  o.sc_dispersion_residual = s.sc_dispersion_residual;
  return o;
}

void validate(const Scenario& s) {
  auto fail = [](const std::string& m) { throw config_error(m); };
  if (s.tx.N < 1) fail("tx.n_subcarriers: must be >= 1");
  if (!(s.tx.ts_fraction > 0.0 && s.tx.ts_fraction < 1.0))
    fail("tx.ts_fraction: must be in (0,1)");
  if (!(s.tx.rrc_rolloff >= 0.0 && s.tx.rrc_rolloff <= 1.0))
    fail("tx.rrc_rolloff: must be in [0,1]");
  if (!(s.tx.f_sym_ghz > 0.0)) fail("tx.f_sym_ghz: must be > 0");
  for (double v : s.tx.va)
    if (!(v >= 0.0)) fail("tx.v_a_snu: entries must be >= 0");
  if (s.fiber.loss_db < 0.0) fail("fiber.loss_db: must be >= 0");
  if (!(s.fiber.length_km >= 0.0)) fail("fiber.length_km: must be >= 0");
  if (!(s.detector.eta > 0.0 && s.detector.eta <= 1.0))
    fail("detector.eta: must be in (0,1]");
  if (!(s.detector.v_el >= 0.0)) fail("detector.v_el: must be >= 0");
  if (s.detector.adc_bits < 1 || s.detector.adc_bits > 24)
    fail("detector.adc_bits: must be in [1,24]");
  if (!(s.detector.adc_headroom > 0.0))
    fail("detector.adc_headroom: must be > 0");
  if (!(s.detector.gain_drift >= 0.0 && s.detector.gain_drift < 0.5))
    fail("detector.gain_drift: must be in [0,0.5)");
  if (s.sim.symbols_per_block < 1) fail("sim.symbols_per_block: must be >= 1");
  if (s.sim.m_superimpose < 1) fail("sim.m_superimpose: must be >= 1");
  if (s.sim.calib_blocks < 1) fail("sim.calib_blocks: must be >= 1");
  if (!(s.sim.pilot_bw_ghz > 0.0)) fail("sim.pilot_bw_ghz: must be > 0");
  if (!(s.sim.sync_threshold > 0.0 && s.sim.sync_threshold < 1.0))
    fail("sim.sync_threshold: must be in (0,1)");
  if (!(s.sim.ts_amplitude > 0.0)) fail("sim.ts_amplitude_snu: must be > 0");
  for (double e : {s.security.eps_s, s.security.eps_h, s.security.eps_cor,
                   s.security.eps_pe})
    if (!(e > 0.0 && e < 1.0)) fail("security: every epsilon must be in (0,1)");
  if (!(s.security.pe_samples_m > 0.0 &&
        s.security.pe_samples_m < s.security.block_size_Nt))
    fail("security.pe_samples_m: must be in (0, block_size_nt)");
  if (s.security.d < 1) fail("security.d_bits: must be >= 1");
  try {
    mcqkd::validate(s.codes);
  } catch (const std::domain_error& e) {
    fail(std::string("postproc.code_table: ") + e.what());
  }
  if (s.fer_anchors.empty()) fail("postproc.fer_anchors: must be non-empty");
  if (s.n_min < 1 || s.n_max < s.n_min) fail("optimizer: empty N range");
  if (!(s.va_step > 0.0)) fail("optimizer.va_step: must be > 0");
  if (!(s.va_min < s.va_max)) fail("optimizer: empty V_A range");
  if (!(s.sc_dispersion_residual >= 0.0 && s.sc_dispersion_residual <= 1.0))
    fail("optimizer.sc_dispersion_residual: must be in [0,1]");
}

Scenario scenario_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::ostringstream os;
    os << "config parse error at line " << line_of_offset(text, e.byte) << ": "
       << e.what();
    throw config_error(os.str());
  }
  if (!j.is_object()) throw config_error("config root must be a JSON object");

  Scenario s;
  read(j, "", "name", s.name);
  if (const json* t = section(j, "tx")) {
    read(*t, "tx", "n_subcarriers", s.tx.N);
    read(*t, "tx", "f_sym_ghz", s.tx.f_sym_ghz);
    read(*t, "tx", "ts_fraction", s.tx.ts_fraction);
    read(*t, "tx", "rrc_rolloff", s.tx.rrc_rolloff);
    read(*t, "tx", "dac_rate_gsps", s.tx.dac_rate_gsps);
    read(*t, "tx", "f_shift_ghz", s.tx.f_shift_ghz);
    read(*t, "tx", "v_a_snu", s.tx.va);
  }
  if (const json* t = section(j, "fiber")) {
    read(*t, "fiber", "length_km", s.fiber.length_km);
    bool has_loss = t->contains("loss_db");
    read(*t, "fiber", "loss_db", s.fiber.loss_db);
    read(*t, "fiber", "attenuation_db_per_km", s.fiber.attenuation_db_per_km);
    read(*t, "fiber", "dispersion_ps_nm_km", s.fiber.dispersion_ps_nm_km);
    read(*t, "fiber", "kappa_disp", s.fiber.kappa_disp);
    read(*t, "fiber", "loss_table_db", s.loss_table_db);
    if (!has_loss) s.fiber.loss_db = loss_for_distance(s, s.fiber.length_km);
  }
  if (const json* t = section(j, "detector")) {
    read(*t, "detector", "eta", s.detector.eta);
    read(*t, "detector", "v_el", s.detector.v_el);
    read(*t, "detector", "adc_bits", s.detector.adc_bits);
    read(*t, "detector", "adc_rate_gsps", s.detector.adc_rate_gsps);
    read(*t, "detector", "quantization", s.detector.quantization);
    read(*t, "detector", "adc_headroom", s.detector.adc_headroom);
    read(*t, "detector", "one_time_calibration", s.detector.one_time_calibration);
    read(*t, "detector", "shot_noise", s.detector.shot_noise);
    read(*t, "detector", "gain_drift", s.detector.gain_drift);
  }
  if (const json* t = section(j, "impairments")) {
    read(*t, "impairments", "linewidth_a_hz", s.imp.linewidth_a_hz);
    read(*t, "impairments", "linewidth_b_hz", s.imp.linewidth_b_hz);
    read(*t, "impairments", "delta_f_ab_ghz", s.imp.delta_f_ab_ghz);
    read(*t, "impairments", "pilot_gain_db", s.imp.pilot_gain_db);
    read(*t, "impairments", "extinction_ratio_db", s.imp.extinction_ratio_db);
    read(*t, "impairments", "slow_drift_hz", s.imp.slow_drift_hz);
    read(*t, "impairments", "phase_noise", s.imp.phase_noise);
    read(*t, "impairments", "dispersion", s.imp.dispersion);
    read(*t, "impairments", "channel_noise", s.imp.channel_noise);
    read(*t, "impairments", "xi_inject", s.imp.xi_inject);
  }
  if (const json* t = section(j, "noise")) {
    read(*t, "noise", "rin", s.noise.rin);
    read(*t, "noise", "dac", s.noise.dac);
    read(*t, "noise", "leakage", s.noise.leakage);
    read(*t, "noise", "mod_er", s.noise.mod_er);
    read(*t, "noise", "mod_iq", s.noise.mod_iq);
    read(*t, "noise", "pnc_residual", s.noise.pnc_residual);
    read(*t, "noise", "c_ici", s.noise.c_ici);
    read(*t, "noise", "c_id", s.noise.c_id);
    read(*t, "noise", "combined_linewidth_hz", s.noise.combined_linewidth_hz);
    read(*t, "noise", "va_ref_snu", s.noise.va_ref);
  }
  if (const json* t = section(j, "security")) {
    read(*t, "security", "eps_s", s.security.eps_s);
    read(*t, "security", "eps_h", s.security.eps_h);
    read(*t, "security", "eps_cor", s.security.eps_cor);
    read(*t, "security", "eps_pe", s.security.eps_pe);
    read(*t, "security", "d_bits", s.security.d);
    read(*t, "security", "block_size_nt", s.security.block_size_Nt);
    read(*t, "security", "pe_samples_m", s.security.pe_samples_m);
    read(*t, "security", "p_ec", s.security.p_ec);
  }
  if (const json* t = section(j, "postproc")) {
    if (t->contains("code_table")) {
      try {
        s.codes.entries =
            t->at("code_table").get<std::vector<std::pair<double, double>>>();
      } catch (const json::exception& e) {
        throw config_error(std::string("postproc.code_table: ") + e.what());
      }
    }
    read(*t, "postproc", "fer_anchors", s.fer_anchors);
  }
  if (const json* t = section(j, "optimizer")) {
    read(*t, "optimizer", "n_min", s.n_min);
    read(*t, "optimizer", "n_max", s.n_max);
    read(*t, "optimizer", "va_min", s.va_min);
    read(*t, "optimizer", "va_max", s.va_max);
    read(*t, "optimizer", "va_step", s.va_step);
    std::string obj;
    read(*t, "optimizer", "objective", obj);
    if (!obj.empty()) {
      if (obj == "asymptotic")
        s.objective = SkrObjective::asymptotic;
      else if (obj == "composable")
        s.objective = SkrObjective::composable;
      else
        throw config_error(
            "optimizer.objective: must be \"asymptotic\" or \"composable\"");
    }
    read(*t, "optimizer", "sc_dispersion_residual", s.sc_dispersion_residual);
  }
  if (const json* t = section(j, "sim")) {
    read(*t, "sim", "symbols_per_block", s.sim.symbols_per_block);
    read(*t, "sim", "m_superimpose", s.sim.m_superimpose);
    read(*t, "sim", "lms_step", s.sim.lms_step);
    read(*t, "sim", "lms_epochs", s.sim.lms_epochs);
    read(*t, "sim", "sync_threshold", s.sim.sync_threshold);
    read(*t, "sim", "ts_amplitude_snu", s.sim.ts_amplitude);
    read(*t, "sim", "pnc_fast", s.sim.pnc_fast);
    read(*t, "sim", "pnc_slow", s.sim.pnc_slow);
    read(*t, "sim", "random_delay", s.sim.random_delay);
    read(*t, "sim", "pilot_bw_ghz", s.sim.pilot_bw_ghz);
    read(*t, "sim", "calib_blocks", s.sim.calib_blocks);
  }
  validate(s);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return scenario_from_json(os.str());
}

std::string scenario_to_json(const Scenario& s) {
  json j;
  j["name"] = s.name;
  j["tx"] = {{"n_subcarriers", s.tx.N},
             {"f_sym_ghz", s.tx.f_sym_ghz},
             {"ts_fraction", s.tx.ts_fraction},
             {"rrc_rolloff", s.tx.rrc_rolloff},
             {"dac_rate_gsps", s.tx.dac_rate_gsps},
             {"f_shift_ghz", s.tx.f_shift_ghz},
             {"v_a_snu", s.tx.va}};
  j["fiber"] = {{"length_km", s.fiber.length_km},
                {"loss_db", s.fiber.loss_db},
                {"attenuation_db_per_km", s.fiber.attenuation_db_per_km},
                {"dispersion_ps_nm_km", s.fiber.dispersion_ps_nm_km},
                {"kappa_disp", s.fiber.kappa_disp},
                {"loss_table_db", s.loss_table_db}};
  j["detector"] = {{"eta", s.detector.eta},
                   {"v_el", s.detector.v_el},
                   {"adc_bits", s.detector.adc_bits},
                   {"adc_rate_gsps", s.detector.adc_rate_gsps},
                   {"quantization", s.detector.quantization},
                   {"adc_headroom", s.detector.adc_headroom},
                   {"one_time_calibration", s.detector.one_time_calibration},
                   {"shot_noise", s.detector.shot_noise},
                   {"gain_drift", s.detector.gain_drift}};
  j["impairments"] = {{"linewidth_a_hz", s.imp.linewidth_a_hz},
                      {"linewidth_b_hz", s.imp.linewidth_b_hz},
                      {"delta_f_ab_ghz", s.imp.delta_f_ab_ghz},
                      {"pilot_gain_db", s.imp.pilot_gain_db},
                      {"extinction_ratio_db", s.imp.extinction_ratio_db},
                      {"slow_drift_hz", s.imp.slow_drift_hz},
                      {"phase_noise", s.imp.phase_noise},
                      {"dispersion", s.imp.dispersion},
                      {"channel_noise", s.imp.channel_noise},
                      {"xi_inject", s.imp.xi_inject}};
  j["noise"] = {{"rin", s.noise.rin},
                {"dac", s.noise.dac},
                {"leakage", s.noise.leakage},
                {"mod_er", s.noise.mod_er},
                {"mod_iq", s.noise.mod_iq},
                {"pnc_residual", s.noise.pnc_residual},
                {"c_ici", s.noise.c_ici},
                {"c_id", s.noise.c_id},
                {"combined_linewidth_hz", s.noise.combined_linewidth_hz},
                {"va_ref_snu", s.noise.va_ref}};
  j["security"] = {{"eps_s", s.security.eps_s},
                   {"eps_h", s.security.eps_h},
                   {"eps_cor", s.security.eps_cor},
                   {"eps_pe", s.security.eps_pe},
                   {"d_bits", s.security.d},
                   {"block_size_nt", s.security.block_size_Nt},
                   {"pe_samples_m", s.security.pe_samples_m},
                   {"p_ec", s.security.p_ec}};
  j["postproc"] = {{"code_table", s.codes.entries},
                   {"fer_anchors", s.fer_anchors}};
  j["optimizer"] = {
      {"n_min", s.n_min},
      {"n_max", s.n_max},
      {"va_min", s.va_min},
      {"va_max", s.va_max},
      {"va_step", s.va_step},
      {"objective",
       s.objective == SkrObjective::asymptotic ? "asymptotic" : "composable"},
      {"sc_dispersion_residual", s.sc_dispersion_residual}};
  j["sim"] = {{"symbols_per_block", s.sim.symbols_per_block},
              {"m_superimpose", s.sim.m_superimpose},
              {"lms_step", s.sim.lms_step},
              {"lms_epochs", s.sim.lms_epochs},
              {"sync_threshold", s.sim.sync_threshold},
              {"ts_amplitude_snu", s.sim.ts_amplitude},
              {"pnc_fast", s.sim.pnc_fast},
              {"pnc_slow", s.sim.pnc_slow},
              {"random_delay", s.sim.random_delay},
              {"pilot_bw_ghz", s.sim.pilot_bw_ghz},
              {"calib_blocks", s.sim.calib_blocks}};
  return j.dump(2) + "\n";
}

} // namespace mcqkd
