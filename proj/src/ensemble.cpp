#include "gtr/ensemble.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gtr/parallel.hpp"

namespace gtr {

BreakDensity sample_random_density(std::size_t n_cells, Rng& rng) {
    if (n_cells == 0) throw std::invalid_argument("density needs at least one cell");
    std::vector<double> breakpoints(n_cells + 1);
    for (std::size_t k = 0; k <= n_cells; ++k) {
        breakpoints[k] = -1.0 + 2.0 * static_cast<double>(k) / static_cast<double>(n_cells);
    }
    breakpoints.front() = -1.0;
    breakpoints.back() = 1.0;

    std::vector<double> weights(n_cells);
    double total = 0.0;
    for (double& w : weights) {
        w = -std::log1p(-rng.next_uniform());  // unit exponential
        total += w;
    }
    if (total == 0.0) {
        for (double& w : weights) w = 1.0 / static_cast<double>(n_cells);
    } else {
        for (double& w : weights) w /= total;
    }
    return BreakDensity::piecewise(std::move(breakpoints), std::move(weights));
}

Estimate universal_average_probability(double cos_theta, const EnsembleConfig& config) {
    if (!(cos_theta >= -1.0 && cos_theta <= 1.0)) {
        throw std::domain_error("cos_theta must lie in [-1, 1]");
    }
    if (config.trials == 0) throw std::invalid_argument("ensemble needs trials >= 1");
    if (config.max_cells == 0) throw std::invalid_argument("ensemble needs max_cells >= 1");

    struct Moments {
        std::uint64_t n = 0;
        double mean = 0.0;
        double m2 = 0.0;
    };

    constexpr std::uint64_t kTrialsPerChunk = 1024;
    const std::uint64_t n_chunks = (config.trials + kTrialsPerChunk - 1) / kTrialsPerChunk;
    std::vector<Moments> chunks(n_chunks);

    for_each_chunk(config.trials, kTrialsPerChunk,
                   [&](std::uint64_t chunk, std::uint64_t begin, std::uint64_t end) {
                       Moments acc;
                       for (std::uint64_t t = begin; t < end; ++t) {
                           Rng rng = Rng::substream(config.seed, t);
                           const std::size_t n_cells = 1 + rng.next_below(config.max_cells);
                           const BreakDensity d = sample_random_density(n_cells, rng);
                           const double p = d.cdf(cos_theta);
                           ++acc.n;
                           const double delta = p - acc.mean;
                           acc.mean += delta / static_cast<double>(acc.n);
                           acc.m2 += delta * (p - acc.mean);
                       }
                       chunks[chunk] = acc;
                   });

    // Chan-style merge in fixed chunk order keeps the result independent of
    // the worker count.
    Moments total;
    for (const Moments& c : chunks) {
        if (c.n == 0) continue;
        if (total.n == 0) {
            total = c;
            continue;
        }
        const double delta = c.mean - total.mean;
        const std::uint64_t n = total.n + c.n;
        total.mean += delta * static_cast<double>(c.n) / static_cast<double>(n);
        total.m2 += c.m2 + delta * delta * static_cast<double>(total.n) *
                               static_cast<double>(c.n) / static_cast<double>(n);
        total.n = n;
    }

    Estimate estimate;
    estimate.mean = total.mean;
    estimate.n = total.n;
    estimate.std_error =
        total.n > 1 ? std::sqrt(total.m2 / (static_cast<double>(total.n - 1) *
                                            static_cast<double>(total.n)))
                    : 0.0;
    return estimate;
}

}  // namespace gtr
