#pragma once

// Master-equation right-hand side
//
//   drho/dt = -i [H, rho] + (gamma / 2) (2 s- rho s+ - s+s- rho - rho s+s-)
//
// in two implementations: a dense serial reference built from explicit
// operator matrices, and a structured OpenMP kernel that exploits the fixed
// sparsity of H (diagonal blocks plus a tridiagonal atom-flipping block).
// Both produce the same result up to rounding; the reference is kept for tests
// and benchmarks.

#include "sonoheat/core.hpp"
#include "sonoheat/hamiltonian.hpp"

#include <span>

namespace sonoheat::kernels {

/// Dense reference: O(dim^3).
[[nodiscard]] CMatrix lindblad_rhs_reference(const CMatrix& rho, const CMatrix& h, double gamma,
                                             const CMatrix& lower, const CMatrix& raise);

/// Structured kernel: O(dim^2), parallel over columns of rho.
/// `out` is resized if needed. Results do not depend on the thread count.
void lindblad_rhs(const CMatrix& rho, const HamiltonianTerms& h, double gamma,
                  const FockSpace& space, CMatrix& out);

/// out = y + h * sum_k coeffs[k] * stages[k]; zero coefficients are skipped.
void combine(const CMatrix& y, double h, std::span<const double> coeffs,
             std::span<const CMatrix* const> stages, CMatrix& out);

/// max_ij |err_ij| / (abs_tol + rel_tol * max(|a_ij|, |b_ij|)).
[[nodiscard]] double scaled_error(const CMatrix& err, const CMatrix& a, const CMatrix& b,
                                  double abs_tol, double rel_tol);

}  // namespace sonoheat::kernels
