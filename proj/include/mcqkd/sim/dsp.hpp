#pragma once
// Block DSP primitives shared by the transmitter and receiver models. All
// filtering is circular (frequency-domain on whole records), which is exact
// for the block-wise simulation and avoids filter edge transients.

#include <complex>
#include <cstddef>
#include <vector>

namespace mcqkd::sim {

using cd = std::complex<double>;
using cvec = std::vector<cd>;

// Forward DFT, unscaled; inverse carries the 1/L factor. Plans and their
// aligned buffers are cached per length so repeated transforms of the same
// size are bit-identical call to call.
cvec fft(const cvec& x);
cvec ifft(const cvec& x);

// Signed bin frequency in Hz: k -> (k <= L/2 ? k : k-L) * fs/L.
double bin_freq_hz(std::size_t k, std::size_t len, double fs_hz);

// Analytic signal of a real record: negative-frequency half zeroed, positive
// half doubled, DC and Nyquist kept.
cvec analytic(const std::vector<double>& r);

// In-place multiply by exp(+j*2*pi*bins*n/L); integer bins keep the record
// circularly consistent.
void rotate_tone(cvec& x, long bins);

// Band-limited rational resampling by spectrum embedding; preserves
// continuous-waveform amplitude. Input must have no energy at Nyquist when
// shrinking.
cvec resample_fft(const cvec& x, std::size_t len_out);

// Root-raised-cosine amplitude response sampled on the length-len DFT grid:
// sqrt(os * Hrc(f)) with Hrc peak 1. The os factor makes the TX/RX cascade,
// folded to the symbol grid, an exact Nyquist (ISI-free) filter.
std::vector<double> rrc_gain(std::size_t len, double fs_hz, double sym_hz,
                             double rolloff, double os);

// In-place frequency-domain gain (vector sizes must match).
void apply_gain(cvec& spec, const std::vector<double>& gain);

// Zero every bin whose signed frequency lies outside [lo_hz, hi_hz].
void bandpass(cvec& spec, double fs_hz, double lo_hz, double hi_hz);

// beta2 in s^2/m from the D convention (ps/(nm km), wavelength in nm).
double beta2_from_dispersion(double d_ps_nm_km, double lambda_nm);

// Chromatic dispersion of a complex envelope: spectrum times
// exp(+j * a * f^2) with a = 2*pi^2*beta2*L (f = signed envelope frequency).
void cd_apply(cvec& x, double fs_hz, double a_coeff);

// Receiver-side correction after downconversion by f_shift: the true phase
// a*(f+f_shift)^2 is replaced by its first-order Taylor expansion around each
// subcarrier center and subtracted per segment. Segment boundaries are the
// midpoints between adjacent centers; the end segments extend across the rest
// of the grid. The quadratic remainder within each segment is the surviving
// dispersion noise, which shrinks with the per-segment bandwidth.
std::vector<double> piecewise_cd_phase(std::size_t len, double fs_hz,
                                       double a_coeff, double f_shift_hz,
                                       const std::vector<double>& centers_hz);

void cd_correct(cvec& x, double fs_hz, double a_coeff, double f_shift_hz,
                const std::vector<double>& centers_hz);

} // namespace mcqkd::sim
