#include "hybrid/simulate.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace hybrid;
using namespace hybrid::simulate;

namespace {

channel::ChannelRealization wrap(const CMatrix& m) {
    return {m, {}, static_cast<int>(m.cols()), static_cast<int>(m.rows()), 0.5};
}

SchemeContext fast_context() {
    SchemeContext ctx;
    ctx.factorize.learning_rate = 0.05;
    ctx.factorize.max_iters = 300;
    return ctx;
}

bool overlaps(const CurvePoint& a, const CurvePoint& b) { return a.ci_lo <= b.ci_hi && b.ci_lo <= a.ci_hi; }

} // namespace

TEST_CASE("scheme names round trip") {
    for (auto id : all_schemes) CHECK(parse_scheme(to_string(id)) == id);
    CHECK_THROWS_AS(parse_scheme("omp"), InvalidInput);
}

TEST_CASE("qpsk mapping") {
    const std::vector<std::uint8_t> zero{0, 0};
    const CVector s = qpsk_map(zero);
    CHECK(std::abs(s[0] - cplx(1.0, 1.0) / std::sqrt(2.0)) < 1e-15);
    const std::vector<std::uint8_t> all{0, 0, 0, 1, 1, 0, 1, 1};
    const CVector m = qpsk_map(all);
    for (Eigen::Index i = 0; i < m.size(); ++i) CHECK(std::norm(m[i]) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(qpsk_demap(m) == all);
    CHECK(std::abs(m[3] - cplx(-1.0, -1.0) / std::sqrt(2.0)) < 1e-15);
    const std::vector<std::uint8_t> odd{1, 0, 1};
    CHECK_THROWS_AS(qpsk_map(odd), InvalidInput);
    CHECK(qpsk_slice(cplx(0.2, -3.0)) == m[1]);
}

TEST_CASE("noise variance") {
    CHECK(noise_variance(0.0, 2) == doctest::Approx(2.0));
    CHECK(noise_variance(10.0, 2) == doctest::Approx(0.2));
    CHECK(noise_variance(-20.0, 1) == doctest::Approx(100.0));
}

TEST_CASE("noiseless transmission through the gmd link") {
    Rng rng(1);
    const auto h = channel::random_channel(rng, 16, 4, 3);
    const auto g = precoder::fully_digital_gmd(h, 2);
    const std::vector<std::uint8_t> bits{0, 1, 1, 1};
    const CVector s = qpsk_map(bits);
    const CVector y = transmit(h, g.precoder, g.combiner, s, 0.0, rng);
    CHECK((y - g.effective * s).norm() < 1e-10 * y.norm());
    CHECK(qpsk_demap(sic_detect(g.effective, y)) == bits);
}

TEST_CASE("transmit noise moments") {
    Rng rng(2);
    const auto h = channel::random_channel(rng, 16, 4, 3);
    const auto g = precoder::fully_digital_gmd(h, 2);
    const CVector zero = CVector::Zero(2);
    const double sigma = 0.7;
    const int n = 10000;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += transmit(h, g.precoder, g.combiner, zero, sigma, rng).squaredNorm();
    const double expect = sigma * sigma * (g.combiner.adjoint() * g.combiner).trace().real();
    CHECK(acc / n == doctest::Approx(expect).epsilon(0.05));
}

TEST_CASE("transmit input checks") {
    Rng rng(3);
    const auto h = channel::random_channel(rng, 8, 4, 3);
    const CMatrix d = CMatrix::Identity(8, 2) * 2.0;
    const CMatrix b = CMatrix::Identity(4, 2);
    CHECK_THROWS_AS(transmit(h, d, b, CVector::Zero(2), 0.1, rng), InvalidInput);
    CHECK_THROWS_AS(transmit(h, CMatrix::Identity(8, 2), b, CVector::Zero(3), 0.1, rng), InvalidInput);
    CHECK_THROWS_AS(transmit(h, CMatrix::Identity(8, 2), b, CVector::Zero(2), -1.0, rng), InvalidInput);
}

TEST_CASE("sic detection") {
    Rng rng(4);
    CMatrix q = testing::random_complex(rng, 3, 3).triangularView<Eigen::Upper>();
    const std::vector<std::uint8_t> bits{1, 0, 0, 1, 1, 1};
    const CVector s = qpsk_map(bits);
    CHECK(qpsk_demap(sic_detect(q, q * s)) == bits);

    CMatrix d = CMatrix::Zero(2, 2);
    d(0, 0) = cplx(0.0, 2.0);
    d(1, 1) = 3.0;
    CVector y(2);
    y << cplx(0.0, 2.0) * cplx(0.9, -0.1), cplx(-1.0, 0.4) * 3.0;
    const CVector r = sic_detect(d, y);
    CHECK(r[0] == qpsk_slice(cplx(0.9, -0.1)));
    CHECK(r[1] == qpsk_slice(cplx(-1.0, 0.4)));

    q(1, 1) = 0.0;
    CHECK_THROWS_AS(sic_detect(q, q * s), InvalidInput);
}

TEST_CASE("wilson interval") {
    const auto w = wilson_interval(10, 100);
    CHECK(w.lo == doctest::Approx(0.05523).epsilon(1e-3));
    CHECK(w.hi == doctest::Approx(0.17437).epsilon(1e-3));
    const auto z = wilson_interval(0, 1000);
    CHECK(z.lo == 0.0);
    CHECK(z.hi > 0.0);
    const auto h = wilson_interval(500, 1000);
    CHECK(0.5 - h.lo == doctest::Approx(h.hi - 0.5));
}

TEST_CASE("ber at high snr is tiny") {
    const std::vector<double> grid{40.0};
    const auto c = ber_curve(SchemeId::fully_digital_gmd, grid, 25000, {}, 7, {});
    CHECK(c.points[0].bits == 100000);
    CHECK(c.points[0].value < 1e-4);
}

TEST_CASE("ber in pure noise is one half") {
    const std::vector<double> grid{-80.0};
    const auto c = ber_curve(SchemeId::fully_digital_gmd, grid, 20000, {}, 8, {});
    CHECK(c.points[0].ci_lo <= 0.5);
    CHECK(c.points[0].ci_hi >= 0.5);
}

TEST_CASE("fully digital gmd ber is non-increasing in snr") {
    const std::vector<double> grid{-20, -15, -10, -5, 0, 5, 10};
    const auto c = ber_curve(SchemeId::fully_digital_gmd, grid, 10000, {}, 9, {});
    for (std::size_t i = 1; i < c.points.size(); ++i) CHECK(c.points[i].ci_lo <= c.points[i - 1].ci_hi);
    for (const auto& p : c.points) {
        CHECK(p.value == doctest::Approx(double(p.errors) / double(p.bits)));
        CHECK(p.bits == p.trials * 4);
    }
}

TEST_CASE("doubling the trials stays within the combined interval") {
    const std::vector<double> grid{0.0, 5.0};
    const auto a = ber_curve(SchemeId::fully_digital_gmd, grid, 5000, {}, 10, {});
    const auto b = ber_curve(SchemeId::fully_digital_gmd, grid, 10000, {}, 10, {});
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(overlaps(a.points[i], b.points[i]));
}

TEST_CASE("every scheme is error-free without noise") {
    Rng wr(11);
    const dnn::Mlp net(128, dnn::default_architecture(128, 80), 2, wr);
    SchemeContext ctx;
    ctx.factorize.learning_rate = 0.05;
    ctx.factorize.max_iters = 20000;
    ctx.factorize.tolerance = 0.0;
    ctx.net = &net;
    const std::vector<double> grid{300.0};
    for (auto id : {SchemeId::fully_digital_gmd, SchemeId::fully_digital_svd, SchemeId::sgd_hybrid,
                    SchemeId::phase_projection, SchemeId::dnn_hybrid}) {
        const auto c = ber_curve(id, grid, 50, {}, 12, ctx);
        CHECK(c.points[0].errors == 0);
    }
}

TEST_CASE("hybrid links respect the hardware constraints") {
    Rng wr(13);
    const dnn::Mlp net(128, dnn::default_architecture(128, 80), 2, wr);
    SchemeContext ctx = fast_context();
    ctx.net = &net;
    const LinkDims dims;
    for (std::uint64_t t = 0; t < 10; ++t) {
        const auto h = trial_channel(dims, 14, t);
        for (auto id : {SchemeId::sgd_hybrid, SchemeId::phase_projection, SchemeId::dnn_hybrid}) {
            const auto link = build_link(id, h, dims, ctx, t);
            REQUIRE(link.hybrid.has_value());
            CHECK((link.hybrid->analog.cwiseAbs().array() - 0.25).abs().maxCoeff() < 1e-12);
            CHECK(link.precoder.squaredNorm() <= 2.0 + 1e-9);
        }
    }
    CHECK_THROWS_AS(build_link(SchemeId::dnn_hybrid, trial_channel(dims, 14, 0), dims, {}, 0), InvalidInput);
}

TEST_CASE("spectral efficiency of diag(4, 1)") {
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 0) = 4.0;
    m(1, 1) = 1.0;
    const auto h = wrap(m);
    const auto p = precoder::fully_digital_svd(h, 2);
    const double snr = 10.0 * std::log10(2.0); // noise variance 1
    const double expect = std::log2(1.0 + 16.0) + std::log2(1.0 + 1.0);
    CHECK(spectral_efficiency(h, p.precoder, p.combiner, snr) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(spectral_efficiency(h, p.precoder, p.combiner, -200.0) < 1e-15);
    CHECK_THROWS_AS(spectral_efficiency(h, p.precoder, CMatrix::Zero(2, 2), 0.0), InvalidInput);
}

TEST_CASE("spectral efficiency ordering and monotonicity") {
    const std::vector<double> grid{-20, -10, 0, 10};
    const LinkDims dims;
    const SchemeContext ctx = fast_context();
    for (std::uint64_t t = 0; t < 20; ++t) {
        const auto h = trial_channel(dims, 15, t);
        std::vector<double> best(grid.size());
        const auto svd = build_link(SchemeId::fully_digital_svd, h, dims, ctx, t);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            best[i] = spectral_efficiency(h, svd.precoder, svd.combiner, grid[i]);
            if (i) CHECK(best[i] >= best[i - 1]);
        }
        for (auto id : {SchemeId::sgd_hybrid, SchemeId::phase_projection, SchemeId::fully_digital_gmd}) {
            const auto link = build_link(id, h, dims, ctx, t);
            for (std::size_t i = 0; i < grid.size(); ++i)
                CHECK(spectral_efficiency(h, link.precoder, link.combiner, grid[i]) <= best[i] * (1 + 1e-10));
        }
    }
}

TEST_CASE("parallel curves match the serial reference") {
    const std::vector<double> grid{-5, 5};
    const SchemeContext ctx = fast_context();
    const LinkDims dims;
    for (auto id : {SchemeId::sgd_hybrid, SchemeId::phase_projection}) {
        const auto a = ber_curve(id, grid, 40, dims, 16, ctx);
        const auto b = reference::ber_curve(id, grid, 40, dims, 16, ctx);
        for (std::size_t i = 0; i < grid.size(); ++i) CHECK(a.points[i].errors == b.points[i].errors);
        const auto c = se_curve(id, grid, 20, dims, 16, ctx);
        const auto d = reference::se_curve(id, grid, 20, dims, 16, ctx);
        for (std::size_t i = 0; i < grid.size(); ++i) CHECK(c.points[i].value == d.points[i].value);
    }
}

TEST_CASE("curves are deterministic in the seed") {
    const std::vector<double> grid{0.0};
    const auto a = ber_curve(SchemeId::phase_projection, grid, 200, {}, 17, {});
    const auto b = ber_curve(SchemeId::phase_projection, grid, 200, {}, 17, {});
    CHECK(a.points[0].errors == b.points[0].errors);
    CHECK(trial_channel({}, 17, 0).matrix != trial_channel({}, 18, 0).matrix);
}

TEST_CASE("curve argument checks") {
    const std::vector<double> grid{0.0};
    CHECK_THROWS_AS(ber_curve(SchemeId::fully_digital_gmd, grid, 0, {}, 1, {}), InvalidInput);
    CHECK_THROWS_AS(ber_curve(SchemeId::fully_digital_gmd, {}, 10, {}, 1, {}), InvalidInput);
    LinkDims bad;
    bad.ns = 5;
    CHECK_THROWS_AS(se_curve(SchemeId::fully_digital_gmd, grid, 10, bad, 1, {}), InvalidInput);
}

TEST_CASE("mse traces") {
    const LinkDims dims;
    std::vector<CMatrix> targets;
    for (std::uint64_t t = 0; t < 4; ++t) targets.push_back(precoder::fully_digital_gmd(trial_channel(dims, 19, t), 2).precoder);
    precoder::FactorizeConfig cfg;
    cfg.learning_rate = 0.05;
    cfg.max_iters = 150;
    cfg.seed = 3;
    for (auto m : {MseMethod::sgd_hybrid, MseMethod::analog_only}) {
        const auto tr = mse_trace(m, targets[0], 4, cfg);
        CHECK(tr.size() == 151);
        for (std::size_t i = 1; i < tr.size(); ++i) CHECK(tr[i] <= tr[i - 1]);
        const auto mean = mse_vs_iterations(m, targets, 4, cfg);
        CHECK(mean.size() == 151);
        CHECK(mean.back() <= mean.front());
    }
    const auto tr = mse_trace(MseMethod::sgd_hybrid, targets[0], 4, cfg);
    const auto pf = precoder::initial_factors(16, 4, 2, cfg.seed);
    CHECK(tr[0] == doctest::Approx(precoder::precoder_mse(targets[0], pf.to_factors())).epsilon(1e-12));
}

TEST_CASE("iterations to floor") {
    const std::vector<double> c{10, 5, 1, 0.5, 0.4, 0.4};
    CHECK(iterations_to_floor(c) == 3);
    const std::vector<double> flat{2, 2, 2};
    CHECK(iterations_to_floor(flat) == 0);
    CHECK(iterations_to_floor(std::vector<double>{}) == 0);
}
