#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gtr/measurement.hpp"
#include "gtr/rng.hpp"
#include "gtr/sequential.hpp"

namespace gtr {

struct RunConfig {
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    std::uint64_t chunk_size = 65536;
};

/// Realization of the hidden break point.
struct BreakSample {
    double lambda = 0.0;
};

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t n = 0;

    /// Bernoulli frequency with stderr sqrt(p(1-p)/n).
    static Estimate from_frequency(std::uint64_t count, std::uint64_t n);
};

/// One cascade: sample the break point, compare with the landing coordinate.
/// Strict comparisons match the integral limits; the exact tie, which carries
/// zero mass, is resolved by a fair coin.
template <typename Stream>
Answer cascade_outcome(double landing, const BreakDensity& rho, Stream& rng) {
    const BreakSample brk{rho.sample_break_point(rng)};
    if (brk.lambda < landing) return Answer::yes;
    if (brk.lambda > landing) return Answer::no;
    return rng.next_uniform() < 0.5 ? Answer::yes : Answer::no;
}

template <typename Stream>
OutcomeLabel simulate_single(const UnitVector3& state, const DichotomicMeasurement& m,
                             const std::string& context_key, Stream& rng) {
    if (!m.densities.contains(context_key)) throw MissingContextError(m.id, context_key);
    const double landing = landing_coordinate(state, m.axis);
    return {m.id, cascade_outcome(landing, m.densities.at(context_key), rng)};
}

struct EmpiricalEntry {
    std::string outcome;  // "yes,no" form, ordered as in ProbabilityTable
    std::uint64_t count = 0;
    Estimate estimate;
};

struct EmpiricalTable {
    std::vector<std::string> step_ids;
    std::vector<EmpiricalEntry> entries;
    RunConfig config;

    ProbabilityTable to_probability_table() const;
    const EmpiricalEntry& entry(const std::string& outcome) const;
};

/// Samplewise counterpart of sequence_distribution. Samples are split into
/// chunks, each driven by a substream derived from (seed, chunk index), so
/// the table depends only on (samples, seed, chunk_size) and never on the
/// worker count.
EmpiricalTable simulate_sequence(const Scenario& scenario, const SequenceSpec& sequence,
                                 const RunConfig& config);

}  // namespace gtr
