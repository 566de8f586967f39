#pragma once

// Atom-phonon Hamiltonians for the two driving modes.
//
//   field:  H = omega0 s+s- + nu b'b + Omega (s- + s+) + Lambda (b + b')(s- + s+)
//   laser:  H = delta  s+s- + nu b'b + Omega (s- + s+) + eta Omega (b + b')(s- + s+)
//
// with delta = omega0 - omega_L (blue detuning is delta < 0). The counter-
// rotating parts of (b + b')(s- + s+) are kept. Both modes share one shape,
// captured by HamiltonianTerms.

#include "sonoheat/core.hpp"

#include <span>
#include <variant>

namespace sonoheat {

struct FieldMode {
    cplx amplitude_projection;     // e D01 . E_k / hbar, rad/s
    double wavenumber = 0.0;       // k, 1/m
    double direction_overlap = 0.0;  // k_hat . motion axis
};

struct Couplings {
    double omega_rabi = 0.0;       // |Omega|
    double lambda_coupling = 0.0;  // |Lambda|
    double omega_signed = 0.0;     // before taking magnitudes
    double lambda_signed = 0.0;
};

/// Omega = 2 sum Re(proj), Lambda = -2 dx sum k overlap Im(proj). Stored
/// values are magnitudes; the signed sums are kept alongside.
[[nodiscard]] Couplings couplings_from_modes(std::span<const FieldMode> modes, double dx);

/// Lambda = dx * (gradient of Omega along the motion axis).
[[nodiscard]] double lambda_from_gradient(double dx, double grad_omega);

struct InhomogeneousField {
    double omega_rabi = 0.0;
    double lambda_coupling = 0.0;
};

struct Laser {
    double omega_rabi = 0.0;
    double eta = 0.0;
    double detuning = 0.0;
};

using DriveMode = std::variant<InhomogeneousField, Laser>;

[[nodiscard]] DriveMode drive_mode(const PhysParams& p, DriveKind kind);

/// H = atom s+s- + phonon b'b + carrier (s- + s+) + sideband (b + b')(s- + s+)
struct HamiltonianTerms {
    double atom = 0.0;
    double phonon = 0.0;
    double carrier = 0.0;
    double sideband = 0.0;
};

[[nodiscard]] HamiltonianTerms hamiltonian_terms(const PhysParams& p, const DriveMode& mode);
[[nodiscard]] HamiltonianTerms hamiltonian_terms(const PhysParams& p, DriveKind kind);

/// Dense matrix of H on `space`.
[[nodiscard]] CMatrix build_hamiltonian(const PhysParams& p, const DriveMode& mode, const FockSpace& space);
[[nodiscard]] CMatrix build_hamiltonian(const HamiltonianTerms& h, const FockSpace& space);

}  // namespace sonoheat
