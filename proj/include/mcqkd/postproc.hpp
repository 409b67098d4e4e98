#pragma once
// Post-processing accounting: distance-indexed code-rate table, reconciliation
// efficiency from the selected code, EC leakage, and the FER(beta) fit that
// couples the optimizer to the error-correction layer.

#include <array>
#include <stdexcept>
#include <vector>

namespace mcqkd {

struct CodeTable {
  // (distance_km, code_rate), distances strictly increasing, rates in (0,1)
  // non-increasing.
  std::vector<std::pair<double, double>> entries;
};

CodeTable default_code_table();
void validate(const CodeTable& t);  // throws std::domain_error

// Exact match on tabulated distances, nearest entry otherwise.
double code_rate_for_distance(double length_km, const CodeTable& t);

struct infeasible_code : std::runtime_error {
  infeasible_code() : std::runtime_error(
      "infeasible: beta outside (0,1], code too strong for the channel") {}
};

// beta = CR / (0.5 * log2(1 + SNR)); throws infeasible_code if beta not in (0,1].
double beta_from_code(double cr, double snr);

// EC leakage n*(H_l - beta*I) in bits; H_l is the per-symbol entropy of the
// discretized variable and stays an explicit input.
double leak_ec(double n, double h_l, double beta, double i_ab);

// Logistic FER(beta): logit(FER) = slope*beta + intercept, least-squares fit
// over the anchor pairs. Values are clamped to [0,1]; evaluations outside the
// anchor span set the clamped flag.
struct FerFit {
  double slope = 0.0;
  double intercept = 0.0;
  double beta_lo = 0.0;
  double beta_hi = 1.0;
};

std::vector<std::array<double, 2>> default_fer_anchors();
FerFit fit_fer(const std::vector<std::array<double, 2>>& anchors);
double fer_model(double beta, const FerFit& fit, bool* clamped = nullptr);

} // namespace mcqkd
