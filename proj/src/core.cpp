#include "sonoheat/core.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numeric>

namespace sonoheat {

bool AngularFrequency::finite() const { return std::isfinite(value_); }

std::string to_string(DriveKind kind) {
    return kind == DriveKind::field ? "field" : "laser";
}

DriveKind drive_kind_from_string(const std::string& name) {
    if (name == "field") return DriveKind::field;
    if (name == "laser") return DriveKind::laser;
    throw ValidationError("drive: expected 'field' or 'laser', got '" + name + "'");
}

namespace {

void require(bool ok, const char* field, const char* constraint) {
    if (!ok) throw ValidationError(std::string("params.") + field + ": " + constraint);
}

}  // namespace

void PhysParams::validate(DriveKind kind) const {
    require(std::isfinite(omega0), "omega0", "must be finite");
    require(std::isfinite(nu), "nu", "must be finite");
    require(std::isfinite(omega_rabi), "omega_rabi", "must be finite");
    require(std::isfinite(lambda_coupling), "lambda_coupling", "must be finite");
    require(std::isfinite(gamma), "gamma", "must be finite");
    require(std::isfinite(detuning), "detuning", "must be finite");
    require(std::isfinite(eta), "eta", "must be finite");
    require(nu > 0.0, "nu", "must be > 0");
    require(gamma >= 0.0, "gamma", "must be >= 0");
    require(omega_rabi >= 0.0, "omega_rabi", "must be >= 0");
    require(lambda_coupling >= 0.0, "lambda_coupling", "must be >= 0");
    require(eta >= 0.0 && eta < 1.0, "eta", "must lie in [0, 1)");
    if (kind == DriveKind::field) require(omega0 > 0.0, "omega0", "must be > 0 in field mode");
}

PhysParams lerp(const PhysParams& a, const PhysParams& b, double w) {
    auto mix = [w](double x, double y) { return x + w * (y - x); };
    return {mix(a.omega0, b.omega0),       mix(a.nu, b.nu),
            mix(a.omega_rabi, b.omega_rabi), mix(a.lambda_coupling, b.lambda_coupling),
            mix(a.gamma, b.gamma),         mix(a.detuning, b.detuning),
            mix(a.eta, b.eta)};
}

FockSpace::FockSpace(int cutoff) : cutoff_(cutoff) {
    if (cutoff < 1) throw ValidationError("space.cutoff: must be >= 1");
}

Eigen::Index FockSpace::index(int atom, int phonon) const {
    return static_cast<Eigen::Index>(atom) * levels() + phonon;
}

PureState PureState::from(CVector amplitudes, double tol) {
    const double n = amplitudes.norm();
    if (!(std::abs(n - 1.0) <= tol))
        throw ValidationError("pure state: norm " + std::to_string(n) + " is not 1");
    return PureState(std::move(amplitudes));
}

double hermiticity_error(const CMatrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double min_eigenvalue(const CMatrix& m) {
    // Symmetrize first so the solver sees an exactly Hermitian input.
    const CMatrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

DensityMatrix DensityMatrix::from(CMatrix data, const Tolerances& tol) {
    if (data.rows() != data.cols()) throw ValidationError("density matrix: not square");
    const double herm = sonoheat::hermiticity_error(data);
    if (!(herm <= tol.hermiticity))
        throw ValidationError("density matrix: not Hermitian (error " + std::to_string(herm) + ")");
    const double tr = std::abs(data.trace() - cplx(1.0));
    if (!(tr <= tol.trace))
        throw ValidationError("density matrix: trace deviates from 1 by " + std::to_string(tr));
    const double lo = sonoheat::min_eigenvalue(data);
    if (!(lo >= -tol.psd))
        throw ValidationError("density matrix: negative eigenvalue " + std::to_string(lo));
    return DensityMatrix(std::move(data));
}

DensityMatrix DensityMatrix::unchecked(CMatrix data) { return DensityMatrix(std::move(data)); }

DensityMatrix DensityMatrix::pure(const PureState& psi) {
    const CVector& a = psi.amplitudes();
    return DensityMatrix(a * a.adjoint());
}

double DensityMatrix::hermiticity_error() const { return sonoheat::hermiticity_error(data_); }

double DensityMatrix::trace_error() const { return std::abs(data_.trace() - cplx(1.0)); }

double DensityMatrix::min_eigenvalue() const { return sonoheat::min_eigenvalue(data_); }

double DensityMatrix::purity() const {
    // tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
    return data_.squaredNorm();
}

CMatrix annihilation(const FockSpace& space) {
    const Eigen::Index d = space.dim();
    CMatrix b = CMatrix::Zero(d, d);
    for (int a = 0; a < 2; ++a)
        for (int m = 1; m <= space.cutoff(); ++m)
            b(space.index(a, m - 1), space.index(a, m)) = std::sqrt(static_cast<double>(m));
    return b;
}

CMatrix creation(const FockSpace& space) { return annihilation(space).adjoint(); }

CMatrix number_operator(const FockSpace& space) {
    const Eigen::Index d = space.dim();
    CMatrix n = CMatrix::Zero(d, d);
    for (int a = 0; a < 2; ++a)
        for (int m = 0; m <= space.cutoff(); ++m) n(space.index(a, m), space.index(a, m)) = m;
    return n;
}

CMatrix identity(const FockSpace& space) { return CMatrix::Identity(space.dim(), space.dim()); }

AtomicOps atomic_ops(const FockSpace& space) {
    const Eigen::Index d = space.dim();
    CMatrix lower = CMatrix::Zero(d, d);
    for (int m = 0; m <= space.cutoff(); ++m) lower(space.index(0, m), space.index(1, m)) = 1.0;
    CMatrix raise = lower.adjoint();
    CMatrix excited = raise * lower;
    return {std::move(lower), std::move(raise), std::move(excited)};
}

cplx expectation(const CMatrix& op, const CMatrix& rho) {
    if (op.rows() != rho.rows() || op.cols() != rho.cols() || op.cols() != op.rows())
        throw ValidationError("expectation: dimension mismatch");
    // tr(A B) = sum_ij A_ij B_ji
    return (op.array() * rho.transpose().array()).sum();
}

cplx expectation(const CMatrix& op, const DensityMatrix& rho) { return expectation(op, rho.data()); }

PureState fock_state(const FockSpace& space, int atom, int phonon) {
    if (atom < 0 || atom > 1) throw ValidationError("fock_state: atom level must be 0 or 1");
    if (phonon < 0 || phonon > space.cutoff())
        throw ValidationError("fock_state: phonon level outside 0..cutoff");
    CVector v = CVector::Zero(space.dim());
    v(space.index(atom, phonon)) = 1.0;
    return PureState::from(std::move(v));
}

DensityMatrix diagonal_mixture(const FockSpace& space, int atom, const std::vector<double>& weights) {
    if (atom < 0 || atom > 1) throw ValidationError("diagonal_mixture: atom level must be 0 or 1");
    if (weights.empty() || static_cast<int>(weights.size()) > space.levels())
        throw ValidationError("diagonal_mixture: need 1..cutoff+1 weights");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw ValidationError("diagonal_mixture: weights must be finite and >= 0");
        total += w;
    }
    if (!(total > 0.0)) throw ValidationError("diagonal_mixture: weights sum to zero");
    CMatrix r = CMatrix::Zero(space.dim(), space.dim());
    for (std::size_t m = 0; m < weights.size(); ++m) {
        const auto i = space.index(atom, static_cast<int>(m));
        r(i, i) = weights[m] / total;
    }
    return DensityMatrix::unchecked(std::move(r));
}

}  // namespace sonoheat
