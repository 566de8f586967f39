#pragma once

// Closed-form heating law, regime classification, a linear moment-equation
// surrogate of the master equation, and rate extraction from trajectories.

#include "sonoheat/core.hpp"
#include "sonoheat/lindblad.hpp"

#include "json.hpp"

#include <array>
#include <string>
#include <vector>

namespace sonoheat {

class RegimeError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Lambda / Omega at or above this counts as strong coupling (advisory flag).
inline constexpr double kStrongCouplingRatio = 100.0;

struct RegimeReport {
    bool strong_coupling = false;  // Lambda / Omega >= kStrongCouplingRatio
    bool above_threshold = false;  // 4 Lambda^2 > nu omega0
    double lambda_exponent = 0.0;  // growth exponent, or |oscillation frequency| below threshold
    double ratio_4L2_nuw0 = 0.0;
    double lambda_over_omega = 0.0;  // +inf when Omega = 0
    double heating_rate = 0.0;       // 2 lambda above threshold, else 0
    std::string branch;              // "exponential", "threshold" or "oscillatory"
    std::vector<std::string> warnings;

    [[nodiscard]] std::string to_text() const;
    [[nodiscard]] nlohmann::json to_json() const;
};

/// lambda = nu sqrt(4 Lambda^2 / (nu omega0) - 1) above threshold.
[[nodiscard]] RegimeReport heating_exponent(const PhysParams& p);

/// m(t) = [1 + 8 Lambda^4 / (lambda omega0)^2 sinh^2(lambda t)] m0.
/// Throws RegimeError at or below threshold.
[[nodiscard]] double mean_phonon_analytic(double t, const PhysParams& p, double m0);

// ------------------------------------------------------------ moments
//
// Expectation values of x = b + b', p = i(b' - b) and the Pauli operators.
// The derivation is written out in docs/moment_closure.md.

enum Moment : std::size_t {
    kUnit,   // <1> = tr rho
    kX, kP, kSx, kSy, kSz,
    kXX, kPP, kXPsym,  // <x^2>, <p^2>, <xp + px>
    kXSx, kXSy, kPSx, kPSy,
    kMomentCount
};

using MomentVector = std::array<double, kMomentCount>;

struct MomentState {
    MomentVector v{};

    [[nodiscard]] double mean_phonon() const { return 0.25 * (v[kXX] + v[kPP]) - 0.5 * v[kUnit]; }
    [[nodiscard]] double excited_pop() const { return 0.5 * (v[kUnit] + v[kSz]); }
};

/// Moments of rho (field-mode operator set).
[[nodiscard]] MomentState moments_of(const CMatrix& rho, const FockSpace& space);
/// Atom ground state, phonon Fock state m0: <x^2> = <p^2> = 2 m0 + 1.
[[nodiscard]] MomentState ground_fock_moments(int m0);

/// Hermitian operators whose expectations make up a MomentState, in order.
[[nodiscard]] std::array<CMatrix, kMomentCount> moment_operators(const FockSpace& space);

/// Linear generator G with d/dt v = G v (field mode).
[[nodiscard]] Eigen::MatrixXd moment_generator(const PhysParams& p);
[[nodiscard]] MomentState moment_rhs(const MomentState& s, const PhysParams& p);
/// Largest real part among eigenvalues of the generator: the asymptotic
/// growth rate of <b'b>, comparable to 2 lambda.
[[nodiscard]] double moment_growth_rate(const PhysParams& p);

struct MomentTrajectory {
    std::vector<double> times;
    std::vector<double> mean_phonon;
    std::vector<double> excited_pop;
};

/// Integrates the moment system with the exact propagator exp(G dt).
[[nodiscard]] MomentTrajectory integrate_moments(const MomentState& s0, const PhysParams& p,
                                                 double t_final, double sample_every);

// ------------------------------------------------------------ fitting

/// Least-squares slope of log(mean_phonon) over samples with t in [t_lo, t_hi].
/// Throws ValidationError for non-positive samples or fewer than 5 points.
[[nodiscard]] double fit_heating_rate(const Trajectory& traj, double t_lo, double t_hi);
/// Same over the last third of the trajectory.
[[nodiscard]] double fit_heating_rate(const Trajectory& traj);
/// Least-squares slope of mean_phonon itself (signed, usable near zero).
[[nodiscard]] double fit_linear_rate(const Trajectory& traj, double t_lo, double t_hi);

}  // namespace sonoheat
