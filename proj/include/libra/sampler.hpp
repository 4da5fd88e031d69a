#pragma once

#include <optional>
#include <string>

#include "libra/model.hpp"

namespace libra {

struct ShotRecord {
    uint64_t shot_index = 0;
    Syndrome syndrome;
    ObsMask true_observables = 0;
    std::optional<ErrorConfig> true_config;  // retained only in debug mode
};

// Each hyperedge fires independently with its probability.  The shot is a
// pure function of (model, seed, shot_index); shots can be drawn in any
// order or concurrently.
ShotRecord sample_shot(const ErrorModel& model, uint64_t seed, uint64_t shot_index,
                       bool keep_config = false);

// Text persistence, one line per shot:
//   S: <space-separated detector indices> | O: <observable bitmask as hex>
std::string format_shot(const ShotRecord& shot);
ShotRecord parse_shot(const std::string& line, const ErrorModel& model, uint64_t shot_index);

}  // namespace libra
