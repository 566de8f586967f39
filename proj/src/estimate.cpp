#include "sonoheat/estimate.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace sonoheat::estimate {

void BubbleScenario::validate() const {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw ValidationError("estimate.radius: must be > 0");
    if (!(particle_count > 0.0) || !std::isfinite(particle_count))
        throw ValidationError("estimate.particle_count: must be > 0");
    if (!(particle_mass > 0.0) || !std::isfinite(particle_mass))
        throw ValidationError("estimate.mass: must be > 0");
}

double species_mass(const std::string& name) {
    if (name == "argon" || name == "Argon" || name == "Ar") return kArgonMass;
    throw ValidationError("estimate.species: unknown species '" + name + "' (known: argon)");
}

double confinement_length(const BubbleScenario& scn) {
    scn.validate();
    return scn.radius / std::cbrt(scn.particle_count);
}

AngularFrequency phonon_frequency(double mass, double dx) {
    if (!(mass > 0.0) || !(dx > 0.0)) throw ValidationError("phonon_frequency: mass and dx must be > 0");
    return AngularFrequency(kHbar / (2.0 * mass * dx * dx));
}

double confinement_from_frequency(double mass, AngularFrequency nu) {
    if (!(mass > 0.0) || !(nu.value() > 0.0))
        throw ValidationError("confinement_from_frequency: mass and nu must be > 0");
    return std::sqrt(kHbar / (2.0 * mass * nu.value()));
}

double lamb_dicke(double dx, double laser_wavelength) {
    if (!(dx >= 0.0) || !(laser_wavelength > 0.0))
        throw ValidationError("lamb_dicke: dx must be >= 0 and wavelength > 0");
    return 2.0 * std::numbers::pi * dx / laser_wavelength;
}

std::string EstimateReport::to_text() const {
    std::ostringstream out;
    char buf[128];
    out << "# order-of-magnitude estimates\n";
    std::snprintf(buf, sizeof buf, "dx = %.6g m\n", dx);
    out << buf;
    std::snprintf(buf, sizeof buf, "nu = %.6g rad/s\n", nu);
    out << buf;
    if (eta) {
        std::snprintf(buf, sizeof buf, "eta = %.6g\n", *eta);
        out << buf;
    }
    return out.str();
}

EstimateReport run(const BubbleScenario& scn, std::optional<double> laser_wavelength) {
    EstimateReport r;
    r.dx = confinement_length(scn);
    r.nu = phonon_frequency(scn.particle_mass, r.dx).value();
    if (laser_wavelength) r.eta = lamb_dicke(r.dx, *laser_wavelength);
    return r;
}

}  // namespace sonoheat::estimate
