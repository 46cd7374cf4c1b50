#include "hybrid/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hybrid::decomp {

SvdFactors svd(const CMatrix& m) {
    if (m.size() == 0) throw InvalidInput("svd: empty matrix");
    if (!all_finite(m)) throw InvalidInput("svd: matrix has non-finite entries");
    Eigen::JacobiSVD<CMatrix> solver(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    SvdFactors f{solver.matrixU(), solver.singularValues(), solver.matrixV()};
    // Phase convention: the largest-magnitude entry of each right singular
    // vector is real and positive.
    for (Eigen::Index k = 0; k < f.v.cols(); ++k) {
        Eigen::Index i = 0;
        f.v.col(k).cwiseAbs().maxCoeff(&i);
        const double mag = std::abs(f.v(i, k));
        if (mag == 0.0) continue;
        const cplx rot = std::conj(f.v(i, k)) / mag;
        f.v.col(k) *= rot;
        f.u.col(k) *= rot;
    }
    return f;
}

double geometric_mean_sigma(std::span<const double> sigma, int ns) {
    if (ns < 1 || static_cast<std::size_t>(ns) > sigma.size())
        throw InvalidInput("geometric_mean_sigma: ns out of range");
    double log_sum = 0.0;
    for (int i = 0; i < ns; ++i) {
        if (!(sigma[i] > 0.0))
            throw RankDeficient("geometric_mean_sigma: singular value " + std::to_string(i) +
                                " is not positive");
        log_sum += std::log(sigma[i]);
    }
    return std::exp(log_sum / ns);
}

CMatrix truncate(const SvdFactors& f, int k) {
    return f.u.leftCols(k) * f.sigma.head(k).asDiagonal() * f.v.leftCols(k).adjoint();
}

namespace {

// Moves diagonal entry p of the (still diagonal) trailing block to position k+1.
void symmetric_swap(RMatrix& r, CMatrix& w, CMatrix& v, Eigen::Index a, Eigen::Index b) {
    if (a == b) return;
    r.row(a).swap(r.row(b));
    r.col(a).swap(r.col(b));
    w.col(a).swap(w.col(b));
    v.col(a).swap(v.col(b));
}

} // namespace

GmdFactors gmd(const CMatrix& m, int ns) {
    const int kmax = static_cast<int>(std::min(m.rows(), m.cols()));
    if (ns < 1 || ns > kmax) throw InvalidInput("gmd: ns must lie in [1, min(rows, cols)]");

    SvdFactors f = svd(m);
    if (!(f.sigma[ns - 1] > 1e-12 * f.sigma[0]))
        throw RankDeficient("gmd: rank of input is below ns=" + std::to_string(ns));

    const double sbar = geometric_mean_sigma({f.sigma.data(), static_cast<std::size_t>(f.sigma.size())}, ns);

    RMatrix r = f.sigma.head(ns).asDiagonal();
    CMatrix w = f.u.leftCols(ns);
    CMatrix v = f.v.leftCols(ns);

    // Invariant at step k: r is upper triangular, its trailing block k.. is
    // diagonal and that block has geometric mean sbar.
    for (int k = 0; k + 1 < ns; ++k) {
        const double d1 = r(k, k);
        Eigen::Index p = k + 1;
        if (d1 >= sbar) {
            r.diagonal().segment(k + 1, ns - k - 1).minCoeff(&p);
        } else {
            r.diagonal().segment(k + 1, ns - k - 1).maxCoeff(&p);
        }
        p += k + 1;
        symmetric_swap(r, w, v, k + 1, p);

        const double d2 = r(k + 1, k + 1);
        if (std::abs(d1 - d2) <= 1e-15 * sbar) continue; // both already at sbar

        // Rotations G1 (right) and G2 (left) with G2^T diag(d1, d2) G1 = [sbar x; 0 d1 d2 / sbar].
        double c2 = ((sbar - d2) * (sbar + d2)) / ((d1 - d2) * (d1 + d2));
        c2 = std::clamp(c2, 0.0, 1.0);
        const double c = std::sqrt(c2);
        const double s = std::sqrt(1.0 - c2);

        Eigen::Matrix2d g1;
        g1 << c, -s, s, c;
        Eigen::Matrix2d g2;
        g2 << d1 * c, -d2 * s, d2 * s, d1 * c;
        g2 /= sbar;

        r.middleCols(k, 2) = r.middleCols(k, 2) * g1;
        r.middleRows(k, 2) = g2.transpose() * r.middleRows(k, 2);
        r(k, k) = sbar;
        r(k + 1, k) = 0.0;
        w.middleCols(k, 2) = w.middleCols(k, 2) * g2.cast<cplx>();
        v.middleCols(k, 2) = v.middleCols(k, 2) * g1.cast<cplx>();
    }

    CMatrix q = r.triangularView<Eigen::Upper>().toDenseMatrix().cast<cplx>();
    return {std::move(w), std::move(q), std::move(v), sbar};
}

} // namespace hybrid::decomp
