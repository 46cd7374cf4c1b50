#pragma once

#include "hybrid/common.hpp"
#include "hybrid/rng.hpp"

#include <vector>

namespace hybrid::channel {

// One propagation path. Angles are in radians on [-pi/2, pi/2].
struct PathParams {
    cplx gain;
    double aod;
    double aoa;
};

// Nr x Nt narrowband channel together with the paths that produced it.
// paths[0] is the line-of-sight component.
struct ChannelRealization {
    CMatrix matrix;
    std::vector<PathParams> paths;
    int nt = 0;
    int nr = 0;
    double spacing_ratio = 0.5;
};

struct GainModel {
    double los_variance = 1.0;
    double nlos_variance = 0.1;
};

// ULA array response, unit norm, element k = exp(-j 2 pi (d/lambda) k sin(angle)) / sqrt(n).
CVector steering_vector(int n_antennas, double angle, double spacing_ratio = 0.5);

// Draws p_nlos + 1 paths: uniform angles and CN(0, var) gains.
std::vector<PathParams> sample_path_params(Rng& rng, int p_nlos, const GainModel& gains = {});

// H = sqrt(nt nr / L) sum_l gain_l a_r(aoa_l) a_t(aod_l)^H with L = paths.size().
ChannelRealization generate_channel(const std::vector<PathParams>& paths, int nt, int nr,
                                    double spacing_ratio = 0.5);

// Convenience: sample paths and build the channel in one call.
ChannelRealization random_channel(Rng& rng, int nt, int nr, int p_nlos, double spacing_ratio = 0.5,
                                  const GainModel& gains = {});

} // namespace hybrid::channel
