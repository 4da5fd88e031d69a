#pragma once

#include "libra/model.hpp"

namespace libra {

// Phenomenological rotated-surface-code memory-Z experiment.  Data-qubit X,
// Z and Y mechanisms per round plus measurement flips; Y mechanisms are
// degree-<=4 hyperedges carrying a decomposition hint into their X and Z
// parts.
struct SurfaceParams {
    int distance = 3;  // odd, >= 3
    int rounds = 1;
    double p_x = 2e-4;
    double p_z = 2e-4;
    double p_y = 2e-4;
    double p_m = 2e-3;

    // SI-1000-style hierarchy: data channels at p/10, measurement at p.
    static SurfaceParams from_noise(int distance, int rounds, double p) {
        return SurfaceParams{distance, rounds, p / 10, p / 10, p / 10, p};
    }
};

ErrorModel generate_surface_model(const SurfaceParams& params);

}  // namespace libra
