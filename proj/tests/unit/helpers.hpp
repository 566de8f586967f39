#pragma once

#include "sonoheat/core.hpp"

#include <random>

namespace testutil {

using sonoheat::cplx;
using sonoheat::CMatrix;

inline std::mt19937_64& rng() {
    static std::mt19937_64 gen(20260114);
    return gen;
}

inline CMatrix random_complex(Eigen::Index rows, Eigen::Index cols) {
    std::normal_distribution<double> n(0.0, 1.0);
    CMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = cplx(n(rng()), n(rng()));
    return m;
}

inline CMatrix random_hermitian(Eigen::Index d) {
    const CMatrix a = random_complex(d, d);
    return 0.5 * (a + a.adjoint());
}

inline CMatrix random_density(Eigen::Index d) {
    const CMatrix a = random_complex(d, d);
    CMatrix rho = a * a.adjoint();
    return rho / rho.trace().real();
}

inline double uniform(double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    return u(rng());
}

inline double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace testutil
