#include "mcqkd/postproc.hpp"

#include <cmath>

namespace mcqkd {

CodeTable default_code_table() {
  return CodeTable{{{5.0, 0.33},
                    {10.0, 0.30},
                    {25.0, 0.18},
                    {50.0, 0.07},
                    {75.0, 0.0325},
                    {100.0, 0.02}}};
}

void validate(const CodeTable& t) {
  if (t.entries.empty()) throw std::domain_error("code table is empty");
  double prev_d = -1.0, prev_r = 2.0;
  for (const auto& [d, r] : t.entries) {
    if (!(r > 0.0 && r < 1.0)) throw std::domain_error("code rate must be in (0,1)");
    if (!(d > prev_d)) throw std::domain_error("distances must be strictly increasing");
    if (r > prev_r) throw std::domain_error("rates must be non-increasing with distance");
    prev_d = d;
    prev_r = r;
  }
}

double code_rate_for_distance(double length_km, const CodeTable& t) {
  validate(t);
  const std::pair<double, double>* best = nullptr;
  double best_gap = 0.0;
  for (const auto& e : t.entries) {
    const double gap = std::abs(e.first - length_km);
    if (!best || gap < best_gap) {
      best = &e;
      best_gap = gap;
    }
  }
  return best->second;
}

double beta_from_code(double cr, double snr) {
  if (!(snr > 0.0)) throw std::domain_error("SNR must be > 0");
  if (!(cr > 0.0)) throw std::domain_error("code rate must be > 0");
  const double beta = cr / (0.5 * std::log2(1.0 + snr));
  if (!(beta > 0.0 && beta <= 1.0)) throw infeasible_code();
  return beta;
}

double leak_ec(double n, double h_l, double beta, double i_ab) {
  if (!(n > 0.0)) throw std::domain_error("n must be > 0");
  if (h_l < beta * i_ab)
    throw std::domain_error("leak_ec: H_l must be >= beta*I");
  return n * (h_l - beta * i_ab);
}

std::vector<std::array<double, 2>> default_fer_anchors() {
  return {{0.9296, 0.0209},
          {0.9299, 0.0234},
          {0.9301, 0.0252},
          {0.9311, 0.0362},
          {0.9305, 0.0292}};
}

FerFit fit_fer(const std::vector<std::array<double, 2>>& anchors) {
  if (anchors.empty()) throw std::domain_error("fer fit: no anchors");
  // Linear regression of logit(FER) on beta.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = double(anchors.size());
  FerFit fit;
  fit.beta_lo = anchors[0][0];
  fit.beta_hi = anchors[0][0];
  for (const auto& [b, f] : anchors) {
    if (!(f > 0.0 && f < 1.0)) throw std::domain_error("fer anchors must be in (0,1)");
    const double y = std::log(f / (1.0 - f));
    sx += b;
    sy += y;
    sxx += b * b;
    sxy += b * y;
    fit.beta_lo = std::min(fit.beta_lo, b);
    fit.beta_hi = std::max(fit.beta_hi, b);
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::domain_error("fer fit: degenerate anchors");
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  return fit;
}

double fer_model(double beta, const FerFit& fit, bool* clamped) {
  if (clamped) *clamped = beta < fit.beta_lo || beta > fit.beta_hi;
  const double z = fit.slope * beta + fit.intercept;
  double f = 1.0 / (1.0 + std::exp(-z));
  if (f < 0.0) f = 0.0;
  if (f > 1.0) f = 1.0;
  return f;
}

} // namespace mcqkd
