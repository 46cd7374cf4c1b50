#pragma once

#include "hybrid/common.hpp"
#include "hybrid/rng.hpp"

#include <random>

namespace testing {

using hybrid::CMatrix;
using hybrid::cplx;

inline CMatrix random_complex(hybrid::Rng& rng, Eigen::Index rows, Eigen::Index cols) {
    std::normal_distribution<double> n(0.0, 1.0);
    CMatrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = cplx(n(rng), n(rng));
    return m;
}

inline CMatrix random_unitary(hybrid::Rng& rng, Eigen::Index n) {
    Eigen::HouseholderQR<CMatrix> qr(random_complex(rng, n, n));
    return qr.householderQ() * CMatrix::Identity(n, n);
}

inline CMatrix random_semi_unitary(hybrid::Rng& rng, Eigen::Index rows, Eigen::Index cols) {
    Eigen::HouseholderQR<CMatrix> qr(random_complex(rng, rows, cols));
    return qr.householderQ() * CMatrix::Identity(rows, cols);
}

inline double orth_dev(const CMatrix& m) {
    return (m.adjoint() * m - CMatrix::Identity(m.cols(), m.cols())).cwiseAbs().maxCoeff();
}

} // namespace testing
