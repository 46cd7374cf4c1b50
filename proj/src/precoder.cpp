#include "hybrid/precoder.hpp"

#include "hybrid/omp.hpp"
#include "hybrid/optim.hpp"
#include "hybrid/rng.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace hybrid::precoder {

CMatrix PhaseFactors::analog() const {
    const double scale = 1.0 / std::sqrt(static_cast<double>(phases.rows()));
    return phases.unaryExpr([scale](double p) { return std::polar(scale, p); });
}

GmdPrecoding fully_digital_gmd(const channel::ChannelRealization& h, int ns) {
    auto f = decomp::gmd(h.matrix, ns);
    return {std::move(f.r1), std::move(f.w1), std::move(f.q1)};
}

SvdPrecoding fully_digital_svd(const channel::ChannelRealization& h, int ns) {
    const int kmax = static_cast<int>(std::min(h.matrix.rows(), h.matrix.cols()));
    if (ns < 1 || ns > kmax) throw InvalidInput("fully_digital_svd: ns must lie in [1, min(nr, nt)]");
    auto f = decomp::svd(h.matrix);
    if (!(f.sigma[ns - 1] > 1e-12 * f.sigma[0]))
        throw RankDeficient("fully_digital_svd: channel rank is below ns=" + std::to_string(ns));
    return {f.v.leftCols(ns), f.u.leftCols(ns), f.sigma.head(ns)};
}

CMatrix phase_project(const CMatrix& target) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(target.rows()));
    // std::arg(0) == 0, so zero entries map to phase 0
    return target.unaryExpr([scale](const cplx& z) { return std::polar(scale, std::arg(z)); });
}

namespace {

void check_conformable(const CMatrix& r1, const HybridFactors& hf, const char* who) {
    if (hf.analog.rows() != r1.rows() || hf.analog.cols() != hf.digital.rows() ||
        hf.digital.cols() != r1.cols())
        throw InvalidInput(std::string(who) + ": dimension mismatch");
}

} // namespace

double hybrid_loss(const CMatrix& r1, const HybridFactors& hf) {
    check_conformable(r1, hf, "hybrid_loss");
    return (r1 - hf.analog * hf.digital).norm();
}

LossForms hybrid_loss_forms(const CMatrix& r1, const HybridFactors& hf) {
    check_conformable(r1, hf, "hybrid_loss_forms");
    const CMatrix e = r1 - hf.analog * hf.digital;
    const double tr = (e * e.adjoint()).trace().real();
    const double sv = decomp::svd(e).sigma.squaredNorm();
    return {e.norm(), std::sqrt(std::max(tr, 0.0)), std::sqrt(sv)};
}

HybridFactors power_normalize(HybridFactors hf) {
    const double ns = static_cast<double>(hf.digital.cols());
    const double power = (hf.analog * hf.digital).squaredNorm();
    if (power > ns) hf.digital *= std::sqrt(ns / power);
    return hf;
}

double precoder_mse(const CMatrix& r1, const HybridFactors& hf) {
    check_conformable(r1, hf, "precoder_mse");
    return (r1 - hf.analog * hf.digital).squaredNorm();
}

double precoder_mse(std::span<const CMatrix> r1s, std::span<const HybridFactors> hfs) {
    if (r1s.size() != hfs.size()) throw InvalidInput("precoder_mse: ensemble sizes differ");
    if (r1s.empty()) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < r1s.size(); ++i) sum += precoder_mse(r1s[i], hfs[i]);
    return sum / static_cast<double>(r1s.size());
}

SquaredLossGradient squared_loss_gradient(const CMatrix& r1, const PhaseFactors& pf) {
    const CMatrix a = pf.analog();
    const CMatrix e = r1 - a * pf.digital;
    // dL/dRe + j dL/dIm = 2 dL/dconj(X)
    CMatrix grad_d = -2.0 * a.adjoint() * e;
    const CMatrix grad_a = -e * pf.digital.adjoint(); // dL/dconj(A)
    // dA/dphi = j A, dL/dphi = 2 Re(conj(dL/dconj(A)) j A)
    RMatrix grad_p = (2.0 * (grad_a.conjugate().array() * a.array() * cplx(0.0, 1.0))).real();
    return {e.squaredNorm(), std::move(grad_p), std::move(grad_d)};
}

PhaseFactors initial_factors(int nt, int nt_rf, int ns, std::uint64_t seed) {
    if (nt < 1 || nt_rf < 1 || ns < 1) throw InvalidInput("initial_factors: dimensions must be >= 1");
    Rng rng = make_rng(seed, streams::factor_init);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5 / nt_rf));
    PhaseFactors pf{RMatrix(nt, nt_rf), CMatrix(nt_rf, ns)};
    for (Eigen::Index j = 0; j < pf.phases.cols(); ++j)
        for (Eigen::Index i = 0; i < pf.phases.rows(); ++i) pf.phases(i, j) = phase(rng);
    for (Eigen::Index j = 0; j < pf.digital.cols(); ++j)
        for (Eigen::Index i = 0; i < pf.digital.rows(); ++i) {
            const double re = normal(rng);
            pf.digital(i, j) = cplx(re, normal(rng));
        }
    return pf;
}

CMatrix least_squares_digital(const CMatrix& analog, const CMatrix& r1) {
    return analog.completeOrthogonalDecomposition().solve(r1);
}

FactorizeResult factorize_sgd(const CMatrix& r1, int nt_rf, const FactorizeConfig& cfg) {
    return factorize_sgd(r1, initial_factors(static_cast<int>(r1.rows()), nt_rf,
                                             static_cast<int>(r1.cols()), cfg.seed),
                         cfg);
}

FactorizeResult factorize_sgd(const CMatrix& r1, PhaseFactors pf, const FactorizeConfig& cfg) {
    const auto nt = r1.rows();
    const auto ns = r1.cols();
    const auto nt_rf = pf.phases.cols();
    if (pf.phases.rows() != nt || pf.digital.rows() != nt_rf || pf.digital.cols() != ns)
        throw InvalidInput("factorize_sgd: starting point does not match the target dimensions");
    if (ns > nt_rf || nt_rf > nt) throw InvalidInput("factorize_sgd: requires Ns <= Nt_RF <= Nt");
    if (!(cfg.learning_rate >= 0.0) || !(cfg.momentum >= 0.0 && cfg.momentum < 1.0) || cfg.max_iters < 0)
        throw InvalidInput("factorize_sgd: invalid optimizer settings");
    if (!all_finite(r1)) throw InvalidInput("factorize_sgd: target has non-finite entries");

    if (!cfg.update_digital) pf.digital = least_squares_digital(pf.analog(), r1);

    RMatrix vel_p = RMatrix::Zero(nt, nt_rf);
    CMatrix vel_d = CMatrix::Zero(nt_rf, ns);

    FactorizeResult out;
    out.loss_trace.reserve(static_cast<std::size_t>(std::min(cfg.max_iters, 100000)) + 1);

    auto g = squared_loss_gradient(r1, pf);
    double loss = std::sqrt(g.value);
    out.loss_trace.push_back(loss);
    PhaseFactors best = pf;
    double best_loss = loss;

    for (int it = 1; it <= cfg.max_iters && loss > 0.0; ++it) {
        sgd_momentum_step(pf.phases, g.grad_phases, vel_p, cfg.momentum, cfg.learning_rate);
        if (cfg.update_digital)
            sgd_momentum_step(pf.digital, g.grad_digital, vel_d, cfg.momentum, cfg.learning_rate);

        const double prev = loss;
        g = squared_loss_gradient(r1, pf);
        loss = std::sqrt(g.value);
        out.loss_trace.push_back(loss);
        out.iterations = it;
        if (!std::isfinite(loss)) break;
        if (loss < best_loss) {
            best_loss = loss;
            best = pf;
        }
        if (std::abs(prev - loss) < cfg.tolerance * prev) {
            out.converged = true;
            break;
        }
    }
    if (loss == 0.0) out.converged = true;

    out.factors = power_normalize(best.to_factors());
    return out;
}

HybridFactors phase_projection_baseline(const CMatrix& r1, int nt_rf) {
    const auto nt = r1.rows();
    const auto ns = r1.cols();
    if (nt_rf < ns || nt_rf > nt) throw InvalidInput("phase_projection_baseline: requires Ns <= Nt_RF <= Nt");
    HybridFactors hf;
    hf.analog = CMatrix::Constant(nt, nt_rf, cplx(1.0 / std::sqrt(static_cast<double>(nt)), 0.0));
    hf.analog.leftCols(ns) = phase_project(r1);
    hf.digital = CMatrix::Zero(nt_rf, ns);
    hf.digital.topRows(ns) = least_squares_digital(hf.analog.leftCols(ns), r1);
    return power_normalize(std::move(hf));
}

std::vector<FactorizeResult> factorize_batch(std::span<const CMatrix> r1s, int nt_rf,
                                             const FactorizeConfig& cfg) {
    std::vector<FactorizeResult> out(r1s.size());
    const auto n = static_cast<long>(r1s.size());
    ParallelErrors errors;
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) {
        errors.run([&] {
            FactorizeConfig local = cfg;
            local.seed = derive_seed(cfg.seed, streams::factor_init, static_cast<std::uint64_t>(i));
            out[static_cast<std::size_t>(i)] = factorize_sgd(r1s[static_cast<std::size_t>(i)], nt_rf, local);
        });
    }
    errors.rethrow();
    return out;
}

namespace reference {

std::vector<FactorizeResult> factorize_batch(std::span<const CMatrix> r1s, int nt_rf,
                                             const FactorizeConfig& cfg) {
    std::vector<FactorizeResult> out;
    out.reserve(r1s.size());
    for (std::size_t i = 0; i < r1s.size(); ++i) {
        FactorizeConfig local = cfg;
        local.seed = derive_seed(cfg.seed, streams::factor_init, i);
        out.push_back(factorize_sgd(r1s[i], nt_rf, local));
    }
    return out;
}

} // namespace reference

} // namespace hybrid::precoder
