#pragma once

// Units, the truncated atom-phonon Hilbert space and density-matrix algebra.
//
// Conventions used throughout the library:
//   * hbar = 1, every frequency is an angular frequency in rad/s;
//   * basis ordering |a, m> -> a * (M + 1) + m, atom index slow, phonon fast;
//   * atom level 0 is the ground state, level 1 the excited state.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace sonoheat {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Raised when an input violates a documented precondition.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Strongly typed angular frequency (rad/s).
class AngularFrequency {
public:
    constexpr AngularFrequency() = default;
    constexpr explicit AngularFrequency(double rad_per_s) : value_(rad_per_s) {}

    [[nodiscard]] constexpr double value() const { return value_; }
    [[nodiscard]] bool finite() const;

    friend constexpr auto operator<=>(AngularFrequency, AngularFrequency) = default;

private:
    double value_ = 0.0;
};

enum class DriveKind { field, laser };

[[nodiscard]] std::string to_string(DriveKind kind);
[[nodiscard]] DriveKind drive_kind_from_string(const std::string& name);

/// Full physical parameter set. Field mode uses omega0, omega_rabi and
/// lambda_coupling; laser mode uses detuning (omega0 - omega_L), omega_rabi
/// and eta. nu and gamma are shared.
struct PhysParams {
    double omega0 = 0.0;
    double nu = 0.0;
    double omega_rabi = 0.0;
    double lambda_coupling = 0.0;
    double gamma = 0.0;
    double detuning = 0.0;
    double eta = 0.0;

    /// Throws ValidationError naming the first offending field.
    void validate(DriveKind kind) const;

    friend bool operator==(const PhysParams&, const PhysParams&) = default;
};

/// Element-wise linear interpolation, `w` in [0, 1].
[[nodiscard]] PhysParams lerp(const PhysParams& a, const PhysParams& b, double w);

/// Truncated space: two atomic levels times phonon levels 0..cutoff.
class FockSpace {
public:
    explicit FockSpace(int cutoff);

    [[nodiscard]] int cutoff() const { return cutoff_; }
    [[nodiscard]] int levels() const { return cutoff_ + 1; }
    [[nodiscard]] Eigen::Index dim() const { return 2 * static_cast<Eigen::Index>(cutoff_ + 1); }
    [[nodiscard]] Eigen::Index index(int atom, int phonon) const;

    friend bool operator==(const FockSpace&, const FockSpace&) = default;

private:
    int cutoff_;
};

struct Tolerances {
    double hermiticity = 1e-10;  // max |rho - rho^dagger|
    double trace = 1e-9;         // |tr rho - 1|
    double psd = 1e-8;           // smallest eigenvalue >= -psd
};

/// Unit-norm state vector.
class PureState {
public:
    static PureState from(CVector amplitudes, double tol = 1e-10);

    [[nodiscard]] const CVector& amplitudes() const { return amps_; }
    [[nodiscard]] Eigen::Index dim() const { return amps_.size(); }

private:
    explicit PureState(CVector a) : amps_(std::move(a)) {}
    CVector amps_;
};

/// Hermitian, unit-trace, positive semidefinite matrix.
class DensityMatrix {
public:
    /// Validating constructor.
    static DensityMatrix from(CMatrix data, const Tolerances& tol = {});
    /// Skips validation; used by the integrator, which monitors instead.
    static DensityMatrix unchecked(CMatrix data);
    static DensityMatrix pure(const PureState& psi);

    [[nodiscard]] const CMatrix& data() const { return data_; }
    [[nodiscard]] Eigen::Index dim() const { return data_.rows(); }

    [[nodiscard]] double hermiticity_error() const;
    [[nodiscard]] double trace_error() const;
    [[nodiscard]] double min_eigenvalue() const;
    [[nodiscard]] double purity() const;

private:
    explicit DensityMatrix(CMatrix d) : data_(std::move(d)) {}
    CMatrix data_;
};

double hermiticity_error(const CMatrix& m);
double min_eigenvalue(const CMatrix& m);

/// b acting on the phonon factor, identity on the atom.
[[nodiscard]] CMatrix annihilation(const FockSpace& space);
[[nodiscard]] CMatrix creation(const FockSpace& space);
[[nodiscard]] CMatrix number_operator(const FockSpace& space);
[[nodiscard]] CMatrix identity(const FockSpace& space);

struct AtomicOps {
    CMatrix lower;    // sigma^-
    CMatrix raise;    // sigma^+
    CMatrix excited;  // sigma^+ sigma^-
};
[[nodiscard]] AtomicOps atomic_ops(const FockSpace& space);

/// tr(op * rho). Throws ValidationError when dimensions disagree.
[[nodiscard]] cplx expectation(const CMatrix& op, const DensityMatrix& rho);
[[nodiscard]] cplx expectation(const CMatrix& op, const CMatrix& rho);

[[nodiscard]] PureState fock_state(const FockSpace& space, int atom, int phonon);
/// Atom in `atom`, phonon populations proportional to `weights` (length <= M+1).
[[nodiscard]] DensityMatrix diagonal_mixture(const FockSpace& space, int atom,
                                             const std::vector<double>& weights);

}  // namespace sonoheat
