#include "hybrid/channel.hpp"

#include <cmath>
#include <numbers>

namespace hybrid::channel {

CVector steering_vector(int n_antennas, double angle, double spacing_ratio) {
    if (n_antennas < 1) throw InvalidInput("steering_vector: n_antennas must be >= 1");
    if (!(spacing_ratio > 0.0)) throw InvalidInput("steering_vector: spacing_ratio must be > 0");
    if (!std::isfinite(angle)) throw InvalidInput("steering_vector: angle is not finite");

    const double scale = 1.0 / std::sqrt(static_cast<double>(n_antennas));
    const double step = -2.0 * std::numbers::pi * spacing_ratio * std::sin(angle);
    CVector a(n_antennas);
    for (int k = 0; k < n_antennas; ++k) a[k] = std::polar(scale, step * k);
    return a;
}

std::vector<PathParams> sample_path_params(Rng& rng, int p_nlos, const GainModel& gains) {
    if (p_nlos < 0) throw InvalidInput("sample_path_params: p_nlos must be >= 0");
    std::uniform_real_distribution<double> angle(-std::numbers::pi / 2, std::numbers::pi / 2);
    std::normal_distribution<double> normal(0.0, 1.0);

    std::vector<PathParams> paths;
    paths.reserve(static_cast<std::size_t>(p_nlos) + 1);
    for (int p = 0; p <= p_nlos; ++p) {
        const double var = p == 0 ? gains.los_variance : gains.nlos_variance;
        const double s = std::sqrt(var / 2.0);
        // fixed draw order: gain re, gain im, aod, aoa
        const double re = normal(rng) * s;
        const double im = normal(rng) * s;
        const double aod = angle(rng);
        const double aoa = angle(rng);
        paths.push_back({{re, im}, aod, aoa});
    }
    return paths;
}

ChannelRealization generate_channel(const std::vector<PathParams>& paths, int nt, int nr,
                                    double spacing_ratio) {
    if (nt < 1 || nr < 1) throw InvalidInput("generate_channel: nt and nr must be >= 1");
    if (paths.empty()) throw InvalidInput("generate_channel: at least one path is required");

    CMatrix h = CMatrix::Zero(nr, nt);
    for (const auto& p : paths) {
        const CVector ar = steering_vector(nr, p.aoa, spacing_ratio);
        const CVector at = steering_vector(nt, p.aod, spacing_ratio);
        h.noalias() += p.gain * ar * at.adjoint();
    }
    h *= std::sqrt(static_cast<double>(nt) * nr / static_cast<double>(paths.size()));
    return {std::move(h), paths, nt, nr, spacing_ratio};
}

ChannelRealization random_channel(Rng& rng, int nt, int nr, int p_nlos, double spacing_ratio,
                                  const GainModel& gains) {
    return generate_channel(sample_path_params(rng, p_nlos, gains), nt, nr, spacing_ratio);
}

} // namespace hybrid::channel
