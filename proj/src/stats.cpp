#include "libra/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace libra {

double logical_error_rate(uint64_t n_f, uint64_t N, int rounds, bool* clamped) {
    if (N == 0)
        throw std::invalid_argument("logical_error_rate requires N > 0");
    if (rounds < 1)
        throw std::invalid_argument("logical_error_rate requires rounds >= 1");
    if (n_f > N)
        throw std::invalid_argument("failure count exceeds shot count");
    double frac = (double)n_f / (double)N;
    if (frac > 0.5) {
        if (clamped)
            *clamped = true;
        return 0.5;
    }
    if (clamped)
        *clamped = false;
    return 0.5 * (1.0 - std::pow(1.0 - 2.0 * frac, 1.0 / (double)rounds));
}

ImprovementRatio improvement_ratio(double eps_baseline, double eps_decoder) {
    if (!(eps_decoder > 0))
        throw std::invalid_argument("improvement_ratio requires eps_decoder > 0");
    return {eps_baseline / eps_decoder, false};
}

ImprovementRatio improvement_ratio_counts(double eps_baseline, uint64_t n_f_decoder, uint64_t N,
                                          int rounds) {
    if (n_f_decoder == 0) {
        // Zero-failure cell: substitute n_f := 1 and flag the result.
        return {eps_baseline / logical_error_rate(1, N, rounds), true};
    }
    return {eps_baseline / logical_error_rate(n_f_decoder, N, rounds), false};
}

double lambda(double eps_small, double eps_large, int d_small, int d_large) {
    if (!(eps_small > 0) || !(eps_large > 0))
        throw std::invalid_argument("lambda requires positive error rates");
    if (d_large <= d_small)
        throw std::invalid_argument("lambda requires d_large > d_small");
    return std::pow(eps_small / eps_large, 2.0 / (double)(d_large - d_small));
}

}  // namespace libra
