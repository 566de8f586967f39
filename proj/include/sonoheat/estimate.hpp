#pragma once

// Order-of-magnitude mapping from bubble and particle data to model
// parameters. None of these are precise; outputs are labelled as estimates.

#include "sonoheat/core.hpp"

#include <optional>
#include <string>

namespace sonoheat::estimate {

inline constexpr double kHbar = 1.054571817e-34;   // J s
inline constexpr double kArgonMass = 6.63e-26;     // kg

struct BubbleScenario {
    double radius = 0.0;          // m
    double particle_count = 0.0;  // N
    double particle_mass = 0.0;   // kg

    void validate() const;
};

/// Mass for a named species ("argon"); throws ValidationError otherwise.
[[nodiscard]] double species_mass(const std::string& name);

/// dx = R / N^(1/3): radius of the volume share of one particle.
[[nodiscard]] double confinement_length(const BubbleScenario& scn);

/// nu = hbar / (2 M dx^2).
[[nodiscard]] AngularFrequency phonon_frequency(double mass, double dx);

/// dx = sqrt(hbar / (2 M nu)); inverse of phonon_frequency.
[[nodiscard]] double confinement_from_frequency(double mass, AngularFrequency nu);

/// eta = 2 pi dx / lambda_L.
[[nodiscard]] double lamb_dicke(double dx, double laser_wavelength);

struct EstimateReport {
    double dx = 0.0;
    double nu = 0.0;
    std::optional<double> eta;

    [[nodiscard]] std::string to_text() const;
};

[[nodiscard]] EstimateReport run(const BubbleScenario& scn, std::optional<double> laser_wavelength);

}  // namespace sonoheat::estimate
