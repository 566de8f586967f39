#pragma once

// Laser-detuning scans. Sign convention: delta = omega0 - omega_L, so the blue
// sideband (omega_L = omega0 + nu) sits at delta = -nu and the red sideband at
// delta = +nu.

#include "sonoheat/core.hpp"
#include "sonoheat/lindblad.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace sonoheat::sideband {

struct DetuningScan {
    std::vector<double> detunings;  // strictly increasing
    std::vector<double> rates;      // signed d<b'b>/dt, least squares over the run
    std::vector<double> log_rates;  // d log<b'b>/dt over the run (0 when undefined)
    std::vector<std::string> status;  // "ok" or a failure message
    PhysParams base;
    double t_final = 0.0;
    int m0 = 0;

    [[nodiscard]] bool ok(std::size_t i) const { return status[i] == "ok"; }
    [[nodiscard]] std::size_t size() const { return detunings.size(); }
};

struct Peak {
    double detuning = 0.0;
    double rate = 0.0;
};

/// Resolved-sideband configuration: gamma = 0.05 nu, eta = 0.1, Omega = 0.2 nu
/// (so eta Omega = 0.02 nu).
[[nodiscard]] PhysParams resolved_sideband_params(double nu = 1.0);

/// One laser-mode evolution per detuning from |0> (x) |m0>. Points run
/// independently (up to `workers` at once); failures are recorded per point.
[[nodiscard]] DetuningScan scan_detuning(const PhysParams& base, const FockSpace& space,
                                         std::vector<double> detunings, double t_final,
                                         const IntegratorConfig& cfg, int m0 = 2, int workers = 1,
                                         int samples = 40);

/// Grid argmax with parabolic refinement through its two neighbours; the
/// result never leaves the bracketing interval. Throws std::runtime_error when
/// every point failed.
[[nodiscard]] Peak locate_peak(const DetuningScan& scan);

/// linspace(lo, hi, count)
[[nodiscard]] std::vector<double> grid(double lo, double hi, int count);

/// CSV with header detuning,rate,status.
void write_scan_csv(std::ostream& out, const DetuningScan& scan);

}  // namespace sonoheat::sideband
