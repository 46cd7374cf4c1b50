#pragma once

#include "hybrid/common.hpp"

#include <span>

namespace hybrid::decomp {

// Thin SVD m = u diag(sigma) v^H, sigma non-increasing, k = min(rows, cols).
struct SvdFactors {
    CMatrix u;
    RVector sigma;
    CMatrix v;
};

// Rank-ns geometric mean decomposition m_ns = w1 q1 r1^H where q1 is upper
// triangular with every diagonal entry equal to sigma_bar, the geometric mean
// of the ns largest singular values.
struct GmdFactors {
    CMatrix w1;
    CMatrix q1;
    CMatrix r1;
    double sigma_bar = 0.0;
};

SvdFactors svd(const CMatrix& m);

// (prod_{i<ns} sigma_i)^(1/ns), accumulated in the log domain.
double geometric_mean_sigma(std::span<const double> sigma, int ns);

GmdFactors gmd(const CMatrix& m, int ns);

// Best rank-k approximation from the SVD.
CMatrix truncate(const SvdFactors& f, int k);

} // namespace hybrid::decomp
