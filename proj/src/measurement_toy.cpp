#include "sonoheat/measurement_toy.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace sonoheat::toy {

namespace {

constexpr double kHermTol = 1e-10;

struct Spectrum {
    std::vector<double> levels;                  // distinct eigenvalues
    std::vector<std::vector<Eigen::Index>> cols;  // eigenvector columns per level
    CMatrix vectors;
};

Spectrum grouped_spectrum(const CMatrix& h) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    const auto& ev = es.eigenvalues();
    const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
    Spectrum s;
    s.vectors = es.eigenvectors();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (s.levels.empty() || ev(i) - s.levels.back() > 1e-9 * scale) {
            s.levels.push_back(ev(i));
            s.cols.emplace_back();
        }
        s.cols.back().push_back(i);
    }
    return s;
}

// Projector I_A (x) P_level on the joint space.
CMatrix sector_projector(const Spectrum& b, std::size_t level, Eigen::Index dim_a) {
    const Eigen::Index db = b.vectors.rows();
    CMatrix p = CMatrix::Zero(db, db);
    for (Eigen::Index c : b.cols[level]) p += b.vectors.col(c) * b.vectors.col(c).adjoint();
    return kron(CMatrix::Identity(dim_a, dim_a), p);
}

void check_dim(const PureState& s, const BipartiteSystem& sys) {
    if (s.dim() != sys.dim_a() * sys.dim_b())
        throw ValidationError("toy: state dimension does not match system");
}

}  // namespace

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

void BipartiteSystem::validate() const {
    if (h_a.rows() != h_a.cols() || h_b.rows() != h_b.cols() || h_a.rows() == 0 || h_b.rows() == 0)
        throw ValidationError("toy: H_A and H_B must be non-empty square matrices");
    const Eigen::Index d = h_a.rows() * h_b.rows();
    if (h_int.rows() != d || h_int.cols() != d)
        throw ValidationError("toy: H_int must act on the joint space");
    if (hermiticity_error(h_a) > kHermTol) throw ValidationError("toy: H_A is not Hermitian");
    if (hermiticity_error(h_b) > kHermTol) throw ValidationError("toy: H_B is not Hermitian");
    if (hermiticity_error(h_int) > kHermTol) throw ValidationError("toy: H_int is not Hermitian");
}

CMatrix BipartiteSystem::total() const {
    return kron(h_a, CMatrix::Identity(dim_b(), dim_b())) +
           kron(CMatrix::Identity(dim_a(), dim_a()), h_b) + h_int;
}

MeasurementRecord absorb_measure(const PureState& state, const BipartiteSystem& sys) {
    sys.validate();
    check_dim(state, sys);
    const Spectrum b = grouped_spectrum(sys.h_b);
    const CVector& psi = state.amplitudes();

    std::vector<double> probs;
    probs.reserve(b.levels.size());
    for (std::size_t k = 0; k < b.levels.size(); ++k)
        probs.push_back((sector_projector(b, k, sys.dim_a()) * psi).squaredNorm());

    CVector projected = sector_projector(b, 0, sys.dim_a()) * psi;
    const double n = projected.norm();
    if (n < 1e-12)
        throw DegenerateOutcome("toy: state has no overlap with the B ground sector");
    projected /= n;

    PureState post = PureState::from(std::move(projected));
    const double before = mean_total_energy_direct(state, sys);
    const double after = mean_total_energy_direct(post, sys);
    return {b.levels, std::move(probs), std::move(post), before, after};
}

PureState propagate(const PureState& state, const BipartiteSystem& sys, double dt) {
    check_dim(state, sys);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(sys.total());
    const CMatrix& v = es.eigenvectors();
    CVector coeff = v.adjoint() * state.amplitudes();
    for (Eigen::Index i = 0; i < coeff.size(); ++i)
        coeff(i) *= std::exp(cplx(0.0, -es.eigenvalues()(i) * dt));
    CVector out = v * coeff;
    out /= out.norm();
    return PureState::from(std::move(out));
}

double excess_energy_prob(const PureState& state, const BipartiteSystem& sys, double dt) {
    sys.validate();
    check_dim(state, sys);
    if (!(dt >= 0.0)) throw ValidationError("toy: dt must be >= 0");
    const Spectrum b = grouped_spectrum(sys.h_b);
    const double in_ground = (sector_projector(b, 0, sys.dim_a()) * state.amplitudes()).squaredNorm();
    if (std::abs(in_ground - 1.0) > 1e-9)
        throw ValidationError("toy: state is not of the form |psi>_A |lambda_0>_B");
    const PureState evolved = propagate(state, sys, dt);
    double p = 0.0;
    for (std::size_t k = 1; k < b.levels.size(); ++k)
        p += (sector_projector(b, k, sys.dim_a()) * evolved.amplitudes()).squaredNorm();
    return p;
}

double mean_total_energy(const PureState& state, const BipartiteSystem& sys) {
    check_dim(state, sys);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(sys.total());
    const CVector xi = es.eigenvectors().adjoint() * state.amplitudes();
    double e = 0.0;
    for (Eigen::Index i = 0; i < xi.size(); ++i) e += std::norm(xi(i)) * es.eigenvalues()(i);
    return e;
}

double mean_total_energy_direct(const PureState& state, const BipartiteSystem& sys) {
    check_dim(state, sys);
    const CVector& psi = state.amplitudes();
    return psi.dot(sys.total() * psi).real();
}

PureState joint_ground_state(const BipartiteSystem& sys) {
    sys.validate();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(sys.total());
    CVector g = es.eigenvectors().col(0);
    g /= g.norm();
    return PureState::from(std::move(g));
}

BipartiteSystem two_qubit_example(double coupling) {
    CMatrix h(2, 2);
    h << 0.0, 0.0, 0.0, 1.0;
    CMatrix sx(2, 2);
    sx << 0.0, 1.0, 1.0, 0.0;
    return {h, h, coupling * kron(sx, sx)};
}

}  // namespace sonoheat::toy
