#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crvpinn/grid.hpp"

namespace crvpinn {

/// Outcome of one randomized identity check on one grid.
struct LemmaResult {
    std::string name;
    int n = 0;
    int trials = 0;
    bool passed = true;
    /// Largest violation seen, relative to the check's own scale.
    double worst = 0.0;
    /// Seed of the first failing trial, meaningful when !passed.
    std::uint64_t witness_seed = 0;
};

struct LemmaOptions {
    int trials = 100;
    std::uint64_t seed = 0;
    /// Negative control: replaces the backward x-difference by its negative.
    bool inject_bug = false;
};

/// Random function vanishing on the boundary, entries uniform in [-1, 1].
GridFunction random_interior_function(const GridSpec& spec, std::uint64_t seed);

/// Integration by parts (both axes), product rule, norm equivalence.
/// Trial t draws u from seed + 2t and v from seed + 2t + 1.
std::vector<LemmaResult> check_lemmas(int n, const LemmaOptions& options);

}  // namespace crvpinn
