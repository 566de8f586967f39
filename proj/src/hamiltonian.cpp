#include "sonoheat/hamiltonian.hpp"

#include <cmath>

namespace sonoheat {

Couplings couplings_from_modes(std::span<const FieldMode> modes, double dx) {
    if (!(dx > 0.0)) throw ValidationError("couplings_from_modes: dx must be > 0");
    double omega = 0.0;
    double lambda = 0.0;
    for (const FieldMode& m : modes) {
        if (!(m.wavenumber >= 0.0)) throw ValidationError("couplings_from_modes: wavenumber must be >= 0");
        omega += 2.0 * m.amplitude_projection.real();
        lambda += -2.0 * dx * m.wavenumber * m.direction_overlap * m.amplitude_projection.imag();
    }
    return {std::abs(omega), std::abs(lambda), omega, lambda};
}

double lambda_from_gradient(double dx, double grad_omega) {
    if (!(dx > 0.0)) throw ValidationError("lambda_from_gradient: dx must be > 0");
    return dx * grad_omega;
}

DriveMode drive_mode(const PhysParams& p, DriveKind kind) {
    if (kind == DriveKind::field) return InhomogeneousField{p.omega_rabi, p.lambda_coupling};
    return Laser{p.omega_rabi, p.eta, p.detuning};
}

HamiltonianTerms hamiltonian_terms(const PhysParams& p, const DriveMode& mode) {
    struct Visitor {
        const PhysParams& p;
        HamiltonianTerms operator()(const InhomogeneousField& f) const {
            return {p.omega0, p.nu, f.omega_rabi, f.lambda_coupling};
        }
        HamiltonianTerms operator()(const Laser& l) const {
            return {l.detuning, p.nu, l.omega_rabi, l.eta * l.omega_rabi};
        }
    };
    return std::visit(Visitor{p}, mode);
}

HamiltonianTerms hamiltonian_terms(const PhysParams& p, DriveKind kind) {
    return hamiltonian_terms(p, drive_mode(p, kind));
}

CMatrix build_hamiltonian(const HamiltonianTerms& h, const FockSpace& space) {
    const Eigen::Index d = space.dim();
    CMatrix out = CMatrix::Zero(d, d);
    const int top = space.cutoff();
    for (int m = 0; m <= top; ++m) {
        const auto g = space.index(0, m);
        const auto e = space.index(1, m);
        out(g, g) = h.phonon * m;
        out(e, e) = h.atom + h.phonon * m;
        out(g, e) = out(e, g) = h.carrier;
        if (m < top) {
            // <0,m|x sx|1,m+1> = <1,m|x sx|0,m+1> = sqrt(m+1)
            const double s = h.sideband * std::sqrt(static_cast<double>(m + 1));
            const auto g1 = space.index(0, m + 1);
            const auto e1 = space.index(1, m + 1);
            out(g, e1) = out(e1, g) = s;
            out(e, g1) = out(g1, e) = s;
        }
    }
    return out;
}

CMatrix build_hamiltonian(const PhysParams& p, const DriveMode& mode, const FockSpace& space) {
    return build_hamiltonian(hamiltonian_terms(p, mode), space);
}

}  // namespace sonoheat
