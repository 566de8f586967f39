#include "sonoheat/sideband.hpp"

#include "sonoheat/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace sonoheat::sideband {

PhysParams resolved_sideband_params(double nu) {
    PhysParams p;
    p.nu = nu;
    p.gamma = 0.05 * nu;
    p.eta = 0.1;
    p.omega_rabi = 0.2 * nu;
    return p;
}

std::vector<double> grid(double lo, double hi, int count) {
    if (count < 1) throw ValidationError("grid: count must be >= 1");
    std::vector<double> g(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k)
        g[static_cast<std::size_t>(k)] = count == 1 ? lo : lo + (hi - lo) * k / (count - 1.0);
    return g;
}

DetuningScan scan_detuning(const PhysParams& base, const FockSpace& space, std::vector<double> detunings,
                           double t_final, const IntegratorConfig& cfg, int m0, int workers, int samples) {
    if (detunings.empty()) throw ValidationError("sideband: empty detuning grid");
    if (!(t_final > 0.0)) throw ValidationError("sideband: t_final must be > 0");
    if (samples < 5) throw ValidationError("sideband: need at least 5 samples per run");
    if (m0 < 0 || m0 > space.cutoff()) throw ValidationError("sideband: m0 outside 0..cutoff");
    base.validate(DriveKind::laser);
    cfg.validate();
    std::sort(detunings.begin(), detunings.end());
    if (std::adjacent_find(detunings.begin(), detunings.end()) != detunings.end())
        throw ValidationError("sideband: detunings must be distinct");

    const std::size_t n = detunings.size();
    DetuningScan scan;
    scan.detunings = detunings;
    scan.rates.assign(n, 0.0);
    scan.log_rates.assign(n, 0.0);
    scan.status.assign(n, "ok");
    scan.base = base;
    scan.t_final = t_final;
    scan.m0 = m0;

    const DensityMatrix rho0 = DensityMatrix::pure(fock_state(space, 0, m0));
    const double sample_every = t_final / samples;
    const long count = static_cast<long>(n);

#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, workers))
    for (long k = 0; k < count; ++k) {
        const auto i = static_cast<std::size_t>(k);
        try {
            PhysParams p = base;
            p.detuning = detunings[i];
            const EvolveResult r =
                evolve(rho0, Schedule::constant(p, 0.0, t_final), DriveKind::laser, space, cfg, sample_every);
            scan.rates[i] = fit_linear_rate(r.trajectory, 0.0, t_final);
            const auto& m = r.trajectory.mean_phonon;
            if (std::all_of(m.begin(), m.end(), [](double v) { return v > 0.0; }))
                scan.log_rates[i] = fit_heating_rate(r.trajectory, 0.0, t_final);
        } catch (const std::exception& e) {
            scan.status[i] = std::string("error: ") + e.what();
        }
    }
    return scan;
}

Peak locate_peak(const DetuningScan& scan) {
    std::size_t best = scan.size();
    for (std::size_t i = 0; i < scan.size(); ++i)
        if (scan.ok(i) && (best == scan.size() || scan.rates[i] > scan.rates[best])) best = i;
    if (best == scan.size()) throw std::runtime_error("locate_peak: every scan point failed");

    Peak peak{scan.detunings[best], scan.rates[best]};
    if (best == 0 || best + 1 >= scan.size() || !scan.ok(best - 1) || !scan.ok(best + 1)) return peak;

    const double x0 = scan.detunings[best - 1], x1 = scan.detunings[best], x2 = scan.detunings[best + 1];
    const double y0 = scan.rates[best - 1], y1 = scan.rates[best], y2 = scan.rates[best + 1];
    // Vertex of the interpolating parabola.
    const double d01 = (y1 - y0) / (x1 - x0);
    const double d12 = (y2 - y1) / (x2 - x1);
    const double curv = (d12 - d01) / (x2 - x0);
    if (!(curv < 0.0)) return peak;
    const double xv = std::clamp(0.5 * (x0 + x1) - d01 / (2.0 * curv), x0, x2);
    const double yv = y1 + d01 * (xv - x1) + curv * (xv - x0) * (xv - x1);
    peak.detuning = xv;
    peak.rate = std::max(yv, y1);
    return peak;
}

void write_scan_csv(std::ostream& out, const DetuningScan& scan) {
    out << "detuning,rate,status\n";
    char buf[128];
    for (std::size_t i = 0; i < scan.size(); ++i) {
        if (!std::isfinite(scan.detunings[i]) || !std::isfinite(scan.rates[i]))
            throw std::runtime_error("scan CSV: non-finite value");
        std::snprintf(buf, sizeof buf, "%.15g,%.15g,", scan.detunings[i], scan.rates[i]);
        // Status text is free-form; keep it CSV-safe.
        std::string st = scan.ok(i) ? "ok" : "failed";
        out << buf << st << '\n';
    }
}

}  // namespace sonoheat::sideband
