#include "sonoheat/dynamics.hpp"

#include "sonoheat/hamiltonian.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>
#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace sonoheat {

// ------------------------------------------------------------ regime

RegimeReport heating_exponent(const PhysParams& p) {
    if (!(p.nu > 0.0) || !(p.omega0 > 0.0))
        throw ValidationError("heating_exponent: nu and omega0 must be > 0");
    RegimeReport r;
    const double L = p.lambda_coupling;
    r.ratio_4L2_nuw0 = 4.0 * L * L / (p.nu * p.omega0);
    r.lambda_over_omega =
        p.omega_rabi > 0.0 ? L / p.omega_rabi : std::numeric_limits<double>::infinity();
    r.strong_coupling = r.lambda_over_omega >= kStrongCouplingRatio;
    r.above_threshold = r.ratio_4L2_nuw0 > 1.0;
    if (r.above_threshold) {
        r.lambda_exponent = p.nu * std::sqrt(r.ratio_4L2_nuw0 - 1.0);
        r.heating_rate = 2.0 * r.lambda_exponent;
        r.branch = "exponential";
    } else if (r.ratio_4L2_nuw0 == 1.0) {
        r.branch = "threshold";
    } else {
        r.lambda_exponent = p.nu * std::sqrt(1.0 - r.ratio_4L2_nuw0);
        r.branch = "oscillatory";
        r.warnings.push_back("below threshold: 4 Lambda^2 <= nu omega0, no exponential heating expected");
    }
    if (!r.strong_coupling)
        r.warnings.push_back("Lambda / Omega below " + std::to_string(kStrongCouplingRatio) +
                             ": strong-coupling assumption not met");
    return r;
}

std::string RegimeReport::to_text() const {
    std::ostringstream out;
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.10g", v);
        return std::string(buf);
    };
    out << "branch = " << branch << '\n'
        << "above_threshold = " << (above_threshold ? "true" : "false") << '\n'
        << "strong_coupling = " << (strong_coupling ? "true" : "false") << '\n'
        << "ratio_4L2_nuw0 = " << num(ratio_4L2_nuw0) << '\n'
        << "lambda_over_omega = " << num(lambda_over_omega) << '\n'
        << "lambda_exponent = " << num(lambda_exponent) << '\n'
        << "heating_rate = " << num(heating_rate) << '\n';
    for (const auto& w : warnings) out << "warning = " << w << '\n';
    return out.str();
}

nlohmann::json RegimeReport::to_json() const {
    nlohmann::json j;
    j["branch"] = branch;
    j["above_threshold"] = above_threshold;
    j["strong_coupling"] = strong_coupling;
    j["ratio_4L2_nuw0"] = ratio_4L2_nuw0;
    // JSON has no infinity; Omega = 0 is reported as null.
    j["lambda_over_omega"] = std::isfinite(lambda_over_omega) ? nlohmann::json(lambda_over_omega)
                                                               : nlohmann::json(nullptr);
    j["lambda_exponent"] = lambda_exponent;
    j["heating_rate"] = heating_rate;
    j["warnings"] = warnings;
    return j;
}

double mean_phonon_analytic(double t, const PhysParams& p, double m0) {
    const RegimeReport r = heating_exponent(p);
    if (!r.above_threshold)
        throw RegimeError("mean_phonon_analytic: requires 4 Lambda^2 > nu omega0 (ratio " +
                          std::to_string(r.ratio_4L2_nuw0) + ")");
    if (!(m0 > 0.0)) throw ValidationError("mean_phonon_analytic: m0 must be > 0");
    const double lam = r.lambda_exponent;
    const double L2 = p.lambda_coupling * p.lambda_coupling;
    const double pref = 8.0 * L2 * L2 / ((lam * p.omega0) * (lam * p.omega0));
    const double s = std::sinh(lam * t);
    return (1.0 + pref * s * s) * m0;
}

// ------------------------------------------------------------ moments

std::array<CMatrix, kMomentCount> moment_operators(const FockSpace& space) {
    const CMatrix b = annihilation(space);
    const CMatrix bd = b.adjoint();
    const AtomicOps at = atomic_ops(space);
    const cplx i(0.0, 1.0);
    const CMatrix one = identity(space);
    const CMatrix x = b + bd;
    const CMatrix p = i * (bd - b);
    const CMatrix sx = at.raise + at.lower;
    const CMatrix sy = -i * (at.raise - at.lower);
    const CMatrix sz = 2.0 * at.excited - one;
    return {one, x, p, sx, sy, sz, x * x, p * p, x * p + p * x, x * sx, x * sy, p * sx, p * sy};
}

MomentState moments_of(const CMatrix& rho, const FockSpace& space) {
    const auto ops = moment_operators(space);
    MomentState s;
    for (std::size_t k = 0; k < kMomentCount; ++k) s.v[k] = expectation(ops[k], rho).real();
    return s;
}

MomentState ground_fock_moments(int m0) {
    MomentState s;
    s.v[kUnit] = 1.0;
    s.v[kSz] = -1.0;
    s.v[kXX] = s.v[kPP] = 2.0 * m0 + 1.0;
    return s;
}

Eigen::MatrixXd moment_generator(const PhysParams& p) {
    // Closure: <O sz> -> -<O> (atom in its ground state), see docs/moment_closure.md.
    const double nu = p.nu;
    const double w = p.omega0;
    const double g = p.lambda_coupling;
    const double om = p.omega_rabi;
    const double gm = p.gamma;
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(kMomentCount, kMomentCount);

    G(kX, kP) = nu;

    G(kP, kX) = -nu;
    G(kP, kSx) = -2.0 * g;

    G(kSx, kSy) = -w;
    G(kSx, kSx) = -0.5 * gm;

    G(kSy, kSx) = w;
    G(kSy, kSz) = -2.0 * om;
    G(kSy, kX) = 2.0 * g;
    G(kSy, kSy) = -0.5 * gm;

    G(kSz, kSy) = 2.0 * om;
    G(kSz, kXSy) = 2.0 * g;
    G(kSz, kSz) = -gm;
    G(kSz, kUnit) = -gm;

    G(kXX, kXPsym) = nu;

    G(kPP, kXPsym) = -nu;
    G(kPP, kPSx) = -4.0 * g;

    G(kXPsym, kPP) = 2.0 * nu;
    G(kXPsym, kXX) = -2.0 * nu;
    G(kXPsym, kXSx) = -4.0 * g;

    G(kXSx, kPSx) = nu;
    G(kXSx, kXSy) = -w;
    G(kXSx, kXSx) = -0.5 * gm;

    G(kXSy, kPSy) = nu;
    G(kXSy, kXSx) = w;
    G(kXSy, kX) = 2.0 * om;
    G(kXSy, kXX) = 2.0 * g;
    G(kXSy, kXSy) = -0.5 * gm;

    G(kPSx, kXSx) = -nu;
    G(kPSx, kPSy) = -w;
    G(kPSx, kUnit) = -2.0 * g;
    G(kPSx, kPSx) = -0.5 * gm;

    G(kPSy, kXSy) = -nu;
    G(kPSy, kPSx) = w;
    G(kPSy, kP) = 2.0 * om;
    G(kPSy, kXPsym) = g;
    G(kPSy, kPSy) = -0.5 * gm;
    return G;
}

MomentState moment_rhs(const MomentState& s, const PhysParams& p) {
    const Eigen::MatrixXd G = moment_generator(p);
    const Eigen::Map<const Eigen::VectorXd> v(s.v.data(), kMomentCount);
    const Eigen::VectorXd d = G * v;
    MomentState out;
    for (std::size_t k = 0; k < kMomentCount; ++k) out.v[k] = d(static_cast<Eigen::Index>(k));
    return out;
}

double moment_growth_rate(const PhysParams& p) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(moment_generator(p), false);
    return es.eigenvalues().real().maxCoeff();
}

MomentTrajectory integrate_moments(const MomentState& s0, const PhysParams& p, double t_final,
                                   double sample_every) {
    if (!(t_final >= 0.0)) throw ValidationError("integrate_moments: t_final must be >= 0");
    MomentTrajectory out;
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(s0.v.data(), kMomentCount);
    auto record = [&](double t) {
        MomentState s;
        for (std::size_t k = 0; k < kMomentCount; ++k) s.v[k] = v(static_cast<Eigen::Index>(k));
        out.times.push_back(t);
        out.mean_phonon.push_back(s.mean_phonon());
        out.excited_pop.push_back(s.excited_pop());
    };
    record(0.0);
    if (t_final == 0.0) return out;
    if (!(sample_every > 0.0)) throw ValidationError("integrate_moments: sample_every must be > 0");
    const long n = std::max(1L, static_cast<long>(std::ceil(t_final / sample_every - 1e-9)));
    const double h = t_final / static_cast<double>(n);
    const Eigen::MatrixXd step = (moment_generator(p) * h).exp();
    for (long k = 1; k <= n; ++k) {
        v = step * v;
        record(h * static_cast<double>(k));
    }
    return out;
}

// ------------------------------------------------------------ fitting

namespace {

template <typename F>
double window_slope(const Trajectory& traj, double t_lo, double t_hi, F&& transform) {
    if (!(t_hi > t_lo)) throw ValidationError("fit: window must satisfy t_lo < t_hi");
    if (traj.size() == 0 || t_lo < traj.times.front() - 1e-12 || t_hi > traj.times.back() + 1e-12)
        throw ValidationError("fit: window lies outside the trajectory span");
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double t = traj.times[i];
        if (t < t_lo - 1e-12 || t > t_hi + 1e-12) continue;
        const double y = transform(traj.mean_phonon[i]);
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
        ++n;
    }
    if (n < 5) throw ValidationError("fit: window holds fewer than 5 samples");
    const double dn = static_cast<double>(n);
    const double denom = dn * stt - st * st;
    return (dn * sty - st * sy) / denom;
}

}  // namespace

double fit_heating_rate(const Trajectory& traj, double t_lo, double t_hi) {
    return window_slope(traj, t_lo, t_hi, [](double m) {
        if (!(m > 0.0)) throw ValidationError("fit_heating_rate: non-positive mean_phonon sample");
        return std::log(m);
    });
}

double fit_heating_rate(const Trajectory& traj) {
    if (traj.size() == 0) throw ValidationError("fit: empty trajectory");
    const double t0 = traj.times.front();
    const double t1 = traj.times.back();
    return fit_heating_rate(traj, t0 + 2.0 * (t1 - t0) / 3.0, t1);
}

double fit_linear_rate(const Trajectory& traj, double t_lo, double t_hi) {
    return window_slope(traj, t_lo, t_hi, [](double m) { return m; });
}

}  // namespace sonoheat
