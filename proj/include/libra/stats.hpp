#pragma once

#include <cstdint>

namespace libra {

// Per-round logical error rate for a memory experiment of `rounds` rounds:
// eps = (1 - (1 - 2 n_f / N)^(1/r)) / 2.  Failure fractions above 1/2 clamp
// to 1/2 (reported via `clamped` when provided).
double logical_error_rate(uint64_t n_f, uint64_t N, int rounds, bool* clamped = nullptr);

struct ImprovementRatio {
    double value = 0;
    bool lower_bound = false;  // decoder had zero failures; n_f := 1 substitute
};

ImprovementRatio improvement_ratio(double eps_baseline, double eps_decoder);
ImprovementRatio improvement_ratio_counts(double eps_baseline, uint64_t n_f_decoder, uint64_t N,
                                          int rounds);

// Error-suppression ratio between two distances:
// (eps_small / eps_large)^(2 / (d_large - d_small)).
double lambda(double eps_small, double eps_large, int d_small, int d_large);

}  // namespace libra
