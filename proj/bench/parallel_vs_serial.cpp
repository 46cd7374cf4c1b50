// Times the OpenMP kernels against their serial references and checks that
// both produce the same numbers.
//
//   bench_parallel [threads]

#include "hybrid/dnn.hpp"
#include "hybrid/omp.hpp"
#include "hybrid/precoder.hpp"
#include "hybrid/simulate.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

using namespace hybrid;

namespace {

template <typename Fn>
double best_of(int reps, Fn&& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

void report(const char* name, double serial, double parallel, bool same) {
    std::printf("%-18s serial %8.3f s  parallel %8.3f s  speedup %5.2fx  %s\n", name, serial, parallel,
                serial / parallel, same ? "match" : "MISMATCH");
}

} // namespace

int main(int argc, char** argv) {
    const int threads = argc > 1 ? std::atoi(argv[1]) : 0;
    set_thread_count(threads);
    std::printf("threads: %d\n", omp_get_max_threads());
    bool all_same = true;

    {
        const std::vector<double> grid{-10, 0, 10};
        const simulate::LinkDims dims;
        simulate::SchemeContext ctx;
        ctx.factorize.learning_rate = 0.1;
        ctx.factorize.max_iters = 300;
        simulate::CurveSeries a, b;
        const double ts = best_of(3, [&] { a = simulate::reference::ber_curve(simulate::SchemeId::sgd_hybrid, grid, 400, dims, 1, ctx); });
        const double tp = best_of(3, [&] { b = simulate::ber_curve(simulate::SchemeId::sgd_hybrid, grid, 400, dims, 1, ctx); });
        bool same = true;
        for (std::size_t i = 0; i < grid.size(); ++i) same = same && a.points[i].errors == b.points[i].errors;
        report("ber_curve", ts, tp, same);
        all_same = all_same && same;
    }
    {
        const dnn::DatasetSpec spec;
        Rng rng(2);
        const auto data = dnn::build_dataset(spec, 256, rng);
        const dnn::OutputCodec codec{16, 4, 2};
        Rng wr(3);
        const dnn::Mlp net(128, dnn::default_architecture(128, codec.dim()), 2, wr);
        std::vector<std::size_t> idx(256);
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        dnn::BatchGradient a, b;
        const double ts = best_of(3, [&] { a = dnn::reference::batch_gradient(net, codec, data, idx, dnn::Mode::train, 4, 0); });
        const double tp = best_of(3, [&] { b = dnn::batch_gradient(net, codec, data, idx, dnn::Mode::train, 4, 0); });
        double diff = 0.0;
        for (std::size_t l = 0; l < net.weights.size(); ++l)
            diff = std::max(diff, (a.grads.weights[l] - b.grads.weights[l]).cwiseAbs().maxCoeff());
        // batched and per-sample products round differently
        report("batch_gradient", ts, tp, diff < 1e-10);
        all_same = all_same && diff < 1e-10;
    }
    {
        const simulate::LinkDims dims;
        std::vector<CMatrix> targets;
        for (std::uint64_t i = 0; i < 64; ++i)
            targets.push_back(precoder::fully_digital_gmd(simulate::trial_channel(dims, 5, i), 2).precoder);
        precoder::FactorizeConfig cfg;
        cfg.learning_rate = 0.1;
        cfg.max_iters = 1000;
        cfg.tolerance = 0.0;
        std::vector<precoder::FactorizeResult> a, b;
        const double ts = best_of(3, [&] { a = precoder::reference::factorize_batch(targets, 4, cfg); });
        const double tp = best_of(3, [&] { b = precoder::factorize_batch(targets, 4, cfg); });
        bool same = true;
        for (std::size_t i = 0; i < a.size(); ++i) same = same && a[i].factors.digital == b[i].factors.digital;
        report("factorize_batch", ts, tp, same);
        all_same = all_same && same;
    }
    return all_same ? 0 : 1;
}
