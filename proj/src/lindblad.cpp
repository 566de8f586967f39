#include "sonoheat/lindblad.hpp"

#include "sonoheat/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace sonoheat {

// ---------------------------------------------------------------- Schedule

Schedule::Schedule(std::vector<Segment> segments) : segments_(std::move(segments)) {
    if (segments_.empty()) throw ValidationError("schedule: at least one segment required");
    for (std::size_t k = 0; k < segments_.size(); ++k) {
        const Segment& s = segments_[k];
        if (!std::isfinite(s.t_start) || !std::isfinite(s.t_end))
            throw ValidationError("schedule[" + std::to_string(k) + "]: non-finite time");
        const bool single_point = segments_.size() == 1 && s.t_end == s.t_start;
        if (!(s.t_end > s.t_start) && !single_point)
            throw ValidationError("schedule[" + std::to_string(k) + "]: t_end must exceed t_start");
        if (k == 0) continue;
        const Segment& prev = segments_[k - 1];
        const std::string where = "[" + std::to_string(s.t_start) + ", " + std::to_string(prev.t_end) + "]";
        if (s.t_start < prev.t_end)
            throw ValidationError("schedule[" + std::to_string(k) + "]: overlaps previous segment on " + where);
        if (s.t_start > prev.t_end)
            throw ValidationError("schedule[" + std::to_string(k) + "]: gap between " +
                                  std::to_string(prev.t_end) + " and " + std::to_string(s.t_start));
    }
}

Schedule Schedule::constant(const PhysParams& p, double t_start, double t_end) {
    return Schedule({Segment{t_start, t_end, p, p}});
}

double Schedule::t_start() const { return segments_.empty() ? 0.0 : segments_.front().t_start; }
double Schedule::t_end() const { return segments_.empty() ? 0.0 : segments_.back().t_end; }

namespace {

PhysParams segment_at(const Segment& s, double t) {
    const double len = s.t_end - s.t_start;
    const double w = len > 0.0 ? std::clamp((t - s.t_start) / len, 0.0, 1.0) : 0.0;
    return lerp(s.from, s.to, w);
}

}  // namespace

PhysParams Schedule::at(double t) const {
    if (segments_.empty()) throw ValidationError("schedule: empty");
    for (const Segment& s : segments_)
        if (t < s.t_end) return segment_at(s, t);
    return segment_at(segments_.back(), t);
}

std::vector<double> Schedule::breakpoints() const {
    std::vector<double> out;
    for (const Segment& s : segments_) out.push_back(s.t_start);
    if (!segments_.empty()) out.push_back(segments_.back().t_end);
    return out;
}

void Schedule::require_covers(double t0, double t1) const {
    if (segments_.empty() || t0 < t_start() || t1 > t_end())
        throw ValidationError("schedule: does not cover [" + std::to_string(t0) + ", " +
                              std::to_string(t1) + "]");
}

void Schedule::validate(DriveKind kind) const {
    if (segments_.empty()) throw ValidationError("schedule: at least one segment required");
    for (std::size_t k = 0; k < segments_.size(); ++k) {
        try {
            segments_[k].from.validate(kind);
            segments_[k].to.validate(kind);
        } catch (const ValidationError& e) {
            throw ValidationError("schedule[" + std::to_string(k) + "]." + e.what());
        }
    }
}

// ---------------------------------------------------------------- config

std::string to_string(Method m) { return m == Method::rk4 ? "rk4" : "dopri45"; }

Method method_from_string(const std::string& s) {
    if (s == "rk4") return Method::rk4;
    if (s == "dopri45") return Method::dopri45;
    throw ValidationError("integrator.method: expected 'rk4' or 'dopri45', got '" + s + "'");
}

std::string to_string(SaturationPolicy p) { return p == SaturationPolicy::warn ? "warn" : "error"; }

SaturationPolicy saturation_policy_from_string(const std::string& s) {
    if (s == "warn") return SaturationPolicy::warn;
    if (s == "error") return SaturationPolicy::error;
    throw ValidationError("integrator.on_saturation: expected 'warn' or 'error', got '" + s + "'");
}

void IntegratorConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("integrator.dt: must be > 0");
    if (!(abs_tol > 0.0)) throw ValidationError("integrator.abs_tol: must be > 0");
    if (!(rel_tol > 0.0)) throw ValidationError("integrator.rel_tol: must be > 0");
    if (max_steps <= 0) throw ValidationError("integrator.max_steps: must be > 0");
    if (!(saturation_threshold > 0.0)) throw ValidationError("integrator.saturation_threshold: must be > 0");
}

// ---------------------------------------------------------------- observables

Observables observe(const CMatrix& rho, const FockSpace& space) {
    Observables o;
    const int levels = space.levels();
    for (int a = 0; a < 2; ++a) {
        for (int m = 0; m < levels; ++m) {
            const auto i = space.index(a, m);
            const double p = rho(i, i).real();
            o.trace += p;
            o.mean_phonon += m * p;
            if (a == 1) o.excited_pop += p;
            if (m == space.cutoff()) o.top_level_pop += p;
        }
    }
    return o;
}

CMatrix rhs(const DensityMatrix& rho, const CMatrix& h, double gamma, const CMatrix& lower,
            const CMatrix& raise) {
    if (h.rows() != rho.dim() || lower.rows() != rho.dim() || raise.rows() != rho.dim())
        throw ValidationError("rhs: dimension mismatch");
    return kernels::lindblad_rhs_reference(rho.data(), h, gamma, lower, raise);
}

double spectral_width_bound(const HamiltonianTerms& h, const FockSpace& space) {
    double lo = 0.0;
    double hi = 0.0;
    bool first = true;
    for (int a = 0; a < 2; ++a) {
        for (int m = 0; m <= space.cutoff(); ++m) {
            const double d = (a ? h.atom : 0.0) + h.phonon * m;
            double r = std::abs(h.carrier) + std::abs(h.sideband) * std::sqrt(static_cast<double>(m));
            if (m < space.cutoff()) r += std::abs(h.sideband) * std::sqrt(m + 1.0);
            lo = first ? d - r : std::min(lo, d - r);
            hi = first ? d + r : std::max(hi, d + r);
            first = false;
        }
    }
    return hi - lo;
}

// ---------------------------------------------------------------- evolve

namespace {

// Dormand-Prince 5(4) tableau.
constexpr std::array<double, 7> kC = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr std::array<double, 7> kErr = {71.0 / 57600,      0.0,         -71.0 / 16695, 71.0 / 1920,
                                        -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

class Stepper {
public:
    Stepper(const Schedule& schedule, DriveKind kind, const FockSpace& space, const IntegratorConfig& cfg)
        : schedule_(schedule), kind_(kind), space_(space), cfg_(cfg), h_(cfg.dt) {
        const Eigen::Index d = space.dim();
        for (auto& k : k_) k.resize(d, d);
        tmp_.resize(d, d);
        zero_ = CMatrix::Zero(d, d);
    }

    // Advances y from ta to tb inside schedule segment `seg`.
    void advance(CMatrix& y, double ta, double tb, std::size_t seg, long& steps, long& rejected) {
        const Segment& s = schedule_.segments()[seg];
        if (cfg_.method == Method::rk4)
            rk4(y, ta, tb, s, steps);
        else
            dopri(y, ta, tb, s, steps, rejected);
    }

private:
    void f(const CMatrix& y, double t, const Segment& s, CMatrix& out) const {
        const PhysParams p = segment_at(s, t);
        kernels::lindblad_rhs(y, hamiltonian_terms(p, kind_), p.gamma, space_, out);
    }

    void check_budget(long steps, double t) const {
        if (steps > cfg_.max_steps)
            throw IntegrationError("integrator: max_steps exceeded at t=" + std::to_string(t), t);
    }

    void rk4(CMatrix& y, double ta, double tb, const Segment& s, long& steps) {
        const double span = tb - ta;
        const long n = std::max(1L, static_cast<long>(std::ceil(span / cfg_.dt - 1e-9)));
        const double h = span / static_cast<double>(n);
        const CMatrix* st[4] = {&k_[0], &k_[1], &k_[2], &k_[3]};
        static constexpr double half[1] = {0.5};
        static constexpr double full[3] = {0.0, 0.0, 1.0};
        static constexpr double w[4] = {1.0 / 6, 1.0 / 3, 1.0 / 3, 1.0 / 6};
        for (long k = 0; k < n; ++k) {
            const double t = ta + h * static_cast<double>(k);
            f(y, t, s, k_[0]);
            kernels::combine(y, h, half, std::span(st, 1), tmp_);
            f(tmp_, t + 0.5 * h, s, k_[1]);
            kernels::combine(y, h, half, std::span(st + 1, 1), tmp_);
            f(tmp_, t + 0.5 * h, s, k_[2]);
            kernels::combine(y, h, full, std::span(st, 3), tmp_);
            f(tmp_, t + h, s, k_[3]);
            kernels::combine(y, h, w, std::span(st, 4), tmp_);
            y.swap(tmp_);
            check_budget(++steps, t);
        }
    }

    void dopri(CMatrix& y, double ta, double tb, const Segment& s, long& steps, long& rejected) {
        double t = ta;
        f(y, t, s, k_[0]);
        const CMatrix* st[7] = {&k_[0], &k_[1], &k_[2], &k_[3], &k_[4], &k_[5], &k_[6]};
        bool last_rejected = false;
        while (t < tb) {
            const double remaining = tb - t;
            double h = std::min(h_, remaining);
            const bool clipped = h < h_;
            if (h <= 1e-14 * std::max(1.0, std::abs(t)))
                throw IntegrationError("integrator: step size underflow at t=" + std::to_string(t), t);

            for (int stage = 1; stage < 7; ++stage) {
                CMatrix& point = stage == 6 ? y_new_ : tmp_;
                kernels::combine(y, h, std::span(kA[stage], stage), std::span(st, stage), point);
                f(point, t + kC[stage] * h, s, k_[stage]);
            }
            kernels::combine(zero_, h, kErr, std::span(st, 7), tmp_);
            const double err = kernels::scaled_error(tmp_, y, y_new_, cfg_.abs_tol, cfg_.rel_tol);
            if (!std::isfinite(err))
                throw IntegrationError("integrator: non-finite state at t=" + std::to_string(t), t);

            if (err <= 1.0) {
                t = clipped ? tb : t + h;
                y.swap(y_new_);
                k_[0].swap(k_[6]);
                check_budget(++steps, t);
                double factor = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
                factor = std::clamp(factor, 0.2, last_rejected ? 1.0 : 5.0);
                // Keep the untruncated step when only the interval end clipped it.
                if (!clipped || factor < 1.0) h_ = h * factor;
                last_rejected = false;
            } else {
                ++rejected;
                h_ = h * std::max(0.2, 0.9 * std::pow(err, -0.2));
                last_rejected = true;
                check_budget(steps + rejected, t);
            }
        }
    }

    const Schedule& schedule_;
    DriveKind kind_;
    const FockSpace& space_;
    IntegratorConfig cfg_;
    double h_;
    std::array<CMatrix, 7> k_;
    CMatrix tmp_;
    CMatrix y_new_;
    CMatrix zero_;
};

}  // namespace

EvolveResult evolve(const DensityMatrix& rho0, const Schedule& schedule, DriveKind kind,
                    const FockSpace& space, const IntegratorConfig& cfg, double sample_every) {
    cfg.validate();
    schedule.validate(kind);
    if (rho0.dim() != space.dim()) throw ValidationError("evolve: rho0 dimension does not match space");
    const double t0 = schedule.t_start();
    const double t1 = schedule.t_end();
    if (t1 > t0 && !(sample_every > 0.0)) throw ValidationError("evolve: sample_every must be > 0");

    EvolveResult result{{}, rho0, {}, 0, 0};
    Trajectory& tr = result.trajectory;
    CMatrix y = rho0.data();
    bool warned = false;

    auto sample = [&](double t) {
        const Observables o = observe(y, space);
        const double herm = hermiticity_error(y);
        const double purity = y.squaredNorm();
        if (!std::isfinite(o.mean_phonon) || !std::isfinite(o.trace) || !std::isfinite(herm) ||
            !std::isfinite(purity)) {
            const double last = tr.times.empty() ? t0 : tr.times.back();
            throw IntegrationError("evolve: non-finite state at t=" + std::to_string(t), last);
        }
        tr.times.push_back(t);
        tr.mean_phonon.push_back(o.mean_phonon);
        tr.excited_pop.push_back(o.excited_pop);
        tr.trace_err.push_back(std::abs(y.trace() - cplx(1.0)));
        const double lo = cfg.track_min_eig ? min_eigenvalue(y) : 0.0;
        if (lo < -Tolerances{}.psd) {
            const double last = tr.times.empty() ? t0 : tr.times.back();
            throw IntegrationError("evolve: positivity lost at t=" + std::to_string(t) + " (min eigenvalue " +
                                       std::to_string(lo) + ")",
                                   last);
        }
        tr.min_eig.push_back(lo);
        tr.purity.push_back(purity);
        tr.hermiticity_err.push_back(herm);
        tr.top_level_pop.push_back(o.top_level_pop);
        if (o.top_level_pop > cfg.saturation_threshold) {
            const std::string msg = "phonon cutoff saturated: population " +
                                    std::to_string(o.top_level_pop) + " at level " +
                                    std::to_string(space.cutoff()) + " (t=" + std::to_string(t) + ")";
            if (cfg.on_saturation == SaturationPolicy::error) throw TruncationError(msg, t);
            if (!warned) result.warnings.push_back(msg);
            warned = true;
        }
    };

    sample(t0);
    if (t1 <= t0) return result;

    // Integration boundaries: sample times plus segment breakpoints.
    std::vector<std::pair<double, bool>> stops;  // (time, is_sample)
    const double span = t1 - t0;
    const long n_samples = static_cast<long>(std::floor(span / sample_every + 1e-9));
    for (long k = 1; k <= n_samples; ++k) {
        const double t = t0 + sample_every * static_cast<double>(k);
        if (t1 - t > 1e-9 * span) stops.emplace_back(t, true);
    }
    stops.emplace_back(t1, true);
    for (double b : schedule.breakpoints())
        if (b > t0 && b < t1) stops.emplace_back(b, false);
    std::sort(stops.begin(), stops.end());

    Stepper stepper(schedule, kind, space, cfg);
    const auto& segs = schedule.segments();
    double t = t0;
    for (std::size_t k = 0; k < stops.size(); ++k) {
        const auto [target, is_sample] = stops[k];
        if (target > t) {
            const double mid = 0.5 * (t + target);
            std::size_t seg = 0;
            while (seg + 1 < segs.size() && mid >= segs[seg].t_end) ++seg;
            stepper.advance(y, t, target, seg, result.steps, result.rejected);
            t = target;
        }
        const bool dup_sample = k + 1 < stops.size() && stops[k + 1].first == target && stops[k + 1].second;
        if (is_sample && !dup_sample) sample(target);
    }

    result.final_state = DensityMatrix::unchecked(std::move(y));
    return result;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    out << "t,mean_phonon,excited_pop,trace_err,min_eig,purity\n";
    char buf[256];
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double row[6] = {traj.times[i],     traj.mean_phonon[i], traj.excited_pop[i],
                               traj.trace_err[i], traj.min_eig[i],     traj.purity[i]};
        for (double v : row)
            if (!std::isfinite(v)) throw std::runtime_error("trajectory CSV: non-finite value");
        std::snprintf(buf, sizeof buf, "%.15g,%.15g,%.15g,%.6e,%.6e,%.15g\n", row[0], row[1], row[2],
                      row[3], row[4], row[5]);
        out << buf;
    }
}

}  // namespace sonoheat
