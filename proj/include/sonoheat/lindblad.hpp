#pragma once

// Time integration of the atom-phonon master equation with piecewise-linear
// parameter schedules.

#include "sonoheat/core.hpp"
#include "sonoheat/hamiltonian.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sonoheat {

/// Parameters ramp linearly from `from` at t_start to `to` at t_end.
struct Segment {
    double t_start = 0.0;
    double t_end = 0.0;
    PhysParams from;
    PhysParams to;

    friend bool operator==(const Segment&, const Segment&) = default;
};

class Schedule {
public:
    Schedule() = default;
    /// Segments must be contiguous, non-overlapping and of positive length.
    explicit Schedule(std::vector<Segment> segments);
    /// A single constant segment; t_end == t_start gives a zero-length span.
    static Schedule constant(const PhysParams& p, double t_start, double t_end);

    [[nodiscard]] double t_start() const;
    [[nodiscard]] double t_end() const;
    [[nodiscard]] PhysParams at(double t) const;
    [[nodiscard]] const std::vector<Segment>& segments() const { return segments_; }
    /// Segment boundaries, including both ends of the span.
    [[nodiscard]] std::vector<double> breakpoints() const;
    /// Throws ValidationError unless [t0, t1] is covered.
    void require_covers(double t0, double t1) const;
    void validate(DriveKind kind) const;

    friend bool operator==(const Schedule&, const Schedule&) = default;

private:
    std::vector<Segment> segments_;
};

enum class Method { rk4, dopri45 };
enum class SaturationPolicy { warn, error };

[[nodiscard]] std::string to_string(Method m);
[[nodiscard]] Method method_from_string(const std::string& s);
[[nodiscard]] std::string to_string(SaturationPolicy p);
[[nodiscard]] SaturationPolicy saturation_policy_from_string(const std::string& s);

struct IntegratorConfig {
    Method method = Method::dopri45;
    double dt = 1e-3;          // fixed step (rk4) or initial step (dopri45)
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    long max_steps = 50'000'000;
    /// Population of phonon level M above which truncation is reported.
    double saturation_threshold = 1e-3;
    SaturationPolicy on_saturation = SaturationPolicy::warn;
    /// Smallest eigenvalue per sample costs O(dim^3); can be switched off.
    bool track_min_eig = true;

    void validate() const;
    friend bool operator==(const IntegratorConfig&, const IntegratorConfig&) = default;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<double> mean_phonon;
    std::vector<double> excited_pop;
    std::vector<double> trace_err;
    std::vector<double> min_eig;
    std::vector<double> purity;
    std::vector<double> hermiticity_err;  // diagnostic only, not serialized
    std::vector<double> top_level_pop;    // population of phonon level M

    [[nodiscard]] std::size_t size() const { return times.size(); }
};

struct EvolveResult {
    Trajectory trajectory;
    DensityMatrix final_state;
    std::vector<std::string> warnings;
    long steps = 0;
    long rejected = 0;
};

class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double last_good_time)
        : std::runtime_error(what), last_good_time_(last_good_time) {}
    [[nodiscard]] double last_good_time() const { return last_good_time_; }

private:
    double last_good_time_;
};

class TruncationError : public IntegrationError {
public:
    using IntegrationError::IntegrationError;
};

/// Integrates rho0 across the schedule span, sampling every `sample_every`
/// (the final time is always sampled).
[[nodiscard]] EvolveResult evolve(const DensityMatrix& rho0, const Schedule& schedule, DriveKind kind,
                                  const FockSpace& space, const IntegratorConfig& cfg,
                                  double sample_every);

/// Dense reference right-hand side as a function of the parameters.
[[nodiscard]] CMatrix rhs(const DensityMatrix& rho, const CMatrix& h, double gamma,
                          const CMatrix& lower, const CMatrix& raise);

/// Observables computed from a density matrix, O(dim) work.
struct Observables {
    double mean_phonon = 0.0;
    double excited_pop = 0.0;
    double trace = 0.0;
    double top_level_pop = 0.0;
};
[[nodiscard]] Observables observe(const CMatrix& rho, const FockSpace& space);

/// CSV with header t,mean_phonon,excited_pop,trace_err,min_eig,purity.
/// Throws std::runtime_error on any non-finite value.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

/// Upper bound on the spread of the spectrum of H; useful for picking RK4 steps.
[[nodiscard]] double spectral_width_bound(const HamiltonianTerms& h, const FockSpace& space);

}  // namespace sonoheat
