#pragma once

#include <cstdint>

#include "gtr/density.hpp"
#include "gtr/montecarlo.hpp"
#include "gtr/rng.hpp"

namespace gtr {

struct EnsembleConfig {
    std::uint64_t trials = 0;
    std::uint64_t max_cells = 1;
    std::uint64_t seed = 0;
};

/// Piecewise-constant density over n_cells equal cells with simplex-uniform
/// weights (normalized unit exponentials).
BreakDensity sample_random_density(std::size_t n_cells, Rng& rng);

/// Averages the analytic yes-probability over random densities: per trial a
/// cell count is drawn from {1..max_cells}, then a density, then p_yes =
/// cdf(cos_theta). The mean converges to the uniform-density (Born) value.
/// Deterministic given the seed: trial t runs on substream(seed, t).
Estimate universal_average_probability(double cos_theta, const EnsembleConfig& config);

}  // namespace gtr
