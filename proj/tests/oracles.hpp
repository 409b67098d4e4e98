#pragma once
// Independent reference implementations used only by tests. Each one takes a
// deliberately different computational route from the library code so that
// agreement is evidence, not tautology.

#include <cstddef>
#include <cstdint>
#include <vector>

namespace oracle {

// Complementary error function, independent of std::erfc: Maclaurin series
// below x = 3, Lentz-evaluated continued fraction above.
long double erfc_cf(long double x);

// Gaussian tail width: solves P(Z > w) = eps by bisection on erfc_cf.
long double gaussian_tail_width(long double eps);

// Smooth-entropy AEP correction evaluated in long double through
// log1p/expm1, a different route from the library's x/(1+sqrt(1-x)) form.
long double aep_delta_ld(long double eps_s, int d);

// Holevo bound by generic linear algebra: builds the two-mode covariance,
// extracts symplectic eigenvalues as |imag| of the eigenvalues of Omega*gamma
// (characteristic polynomial by Faddeev-LeVerrier, roots by Durand-Kerner),
// and the conditional eigenvalue from the Schur complement's determinant.
long double holevo_ld(long double va, long double t_e, long double xi,
                      long double v_el);

// Dense GF(2) Toeplitz hash: materializes the full matrix
// M[j][i] = seed[(n-1)+j-i] and multiplies bit by bit.
std::vector<std::uint8_t> toeplitz_dense(const std::vector<std::uint8_t>& input,
                                         const std::vector<std::uint8_t>& seed,
                                         std::size_t out_len);

} // namespace oracle
