#include "sonoheat/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <vector>

namespace sonoheat::kernels {

CMatrix lindblad_rhs_reference(const CMatrix& rho, const CMatrix& h, double gamma,
                               const CMatrix& lower, const CMatrix& raise) {
    const cplx minus_i(0.0, -1.0);
    const CMatrix excited = raise * lower;
    CMatrix out = minus_i * (h * rho - rho * h);
    out += 0.5 * gamma * (2.0 * lower * rho * raise - excited * rho - rho * excited);
    return out;
}

void lindblad_rhs(const CMatrix& rho, const HamiltonianTerms& h, double gamma,
                  const FockSpace& space, CMatrix& out) {
    const int levels = space.levels();
    const int top = space.cutoff();
    const Eigen::Index d = space.dim();
    if (rho.rows() != d || rho.cols() != d) throw ValidationError("lindblad_rhs: dimension mismatch");
    out.resize(d, d);

    // sqrt(m) for m = 0..M+1
    std::vector<double> root(static_cast<std::size_t>(levels) + 1);
    for (std::size_t m = 0; m < root.size(); ++m) root[m] = std::sqrt(static_cast<double>(m));

    const double half_gamma = 0.5 * gamma;
    const double car = h.carrier;
    const double sb = h.sideband;
    const cplx* src = rho.data();
    cplx* dst = out.data();

#pragma omp parallel for schedule(static)
    for (Eigen::Index j = 0; j < d; ++j) {
        const int aj = static_cast<int>(j / levels);
        const int mj = static_cast<int>(j % levels);
        const Eigen::Index flip = static_cast<Eigen::Index>(1 - aj) * levels;
        const double diag_j = (aj ? h.atom : 0.0) + h.phonon * mj;

        const cplx* col = src + j * d;
        const cplx* col_car = src + (flip + mj) * d;
        const cplx* col_lo = mj > 0 ? src + (flip + mj - 1) * d : nullptr;
        const cplx* col_hi = mj < top ? src + (flip + mj + 1) * d : nullptr;
        const double w_lo = sb * root[mj];
        const double w_hi = sb * root[mj + 1];
        const cplx* jump = (aj == 0) ? src + (j + levels) * d + levels : nullptr;
        cplx* o = dst + j * d;

        for (int ai = 0; ai < 2; ++ai) {
            const Eigen::Index base = static_cast<Eigen::Index>(ai) * levels;
            const Eigen::Index other = static_cast<Eigen::Index>(1 - ai) * levels;
            const double diag_a = ai ? h.atom : 0.0;
            const double decay = -half_gamma * (ai + aj);
            for (int mi = 0; mi <= top; ++mi) {
                const Eigen::Index i = base + mi;
                // (H rho)_ij
                cplx hr = (diag_a + h.phonon * mi) * col[i] + car * col[other + mi];
                if (mi > 0) hr += sb * root[mi] * col[other + mi - 1];
                if (mi < top) hr += sb * root[mi + 1] * col[other + mi + 1];
                // (rho H)_ij
                cplx rh = diag_j * col[i] + car * col_car[i];
                if (col_lo) rh += w_lo * col_lo[i];
                if (col_hi) rh += w_hi * col_hi[i];
                const cplx comm = hr - rh;
                cplx v(comm.imag(), -comm.real());  // -i * comm
                v += decay * col[i];
                if (ai == 0 && jump) v += gamma * jump[mi];
                o[i] = v;
            }
        }
    }
}

void combine(const CMatrix& y, double h, std::span<const double> coeffs,
             std::span<const CMatrix* const> stages, CMatrix& out) {
    const Eigen::Index n = y.size();
    out.resize(y.rows(), y.cols());
    std::vector<std::pair<double, const cplx*>> terms;
    for (std::size_t k = 0; k < coeffs.size(); ++k)
        if (coeffs[k] != 0.0) terms.emplace_back(h * coeffs[k], stages[k]->data());
    const cplx* yp = y.data();
    cplx* op = out.data();
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) {
        cplx acc = yp[i];
        for (const auto& [c, p] : terms) acc += c * p[i];
        op[i] = acc;
    }
}

double scaled_error(const CMatrix& err, const CMatrix& a, const CMatrix& b, double abs_tol,
                    double rel_tol) {
    const Eigen::Index n = err.size();
    const cplx* e = err.data();
    const cplx* pa = a.data();
    const cplx* pb = b.data();
    double worst = 0.0;
#pragma omp parallel for reduction(max : worst) schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) {
        const double scale = abs_tol + rel_tol * std::max(std::abs(pa[i]), std::abs(pb[i]));
        worst = std::max(worst, std::abs(e[i]) / scale);
    }
    return worst;
}

}  // namespace sonoheat::kernels
