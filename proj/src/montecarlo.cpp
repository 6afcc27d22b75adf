#include "gtr/montecarlo.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "gtr/parallel.hpp"

namespace gtr {

Estimate Estimate::from_frequency(std::uint64_t count, std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("frequency estimate needs n >= 1");
    if (count > n) throw std::invalid_argument("count exceeds sample size");
    const double mean = static_cast<double>(count) / static_cast<double>(n);
    return {mean, std::sqrt(mean * (1.0 - mean) / static_cast<double>(n)), n};
}

ProbabilityTable EmpiricalTable::to_probability_table() const {
    std::vector<double> probabilities;
    probabilities.reserve(entries.size());
    for (const auto& e : entries) probabilities.push_back(e.estimate.mean);
    return ProbabilityTable(step_ids, std::move(probabilities));
}

const EmpiricalEntry& EmpiricalTable::entry(const std::string& outcome) const {
    const auto answers = answers_from_outcome_string(outcome, step_ids.size());
    return entries[ProbabilityTable::answer_index(answers)];
}

namespace {

// Per-step sampling plan. Anchored entering states force the answer without
// touching a density, mirroring the analytic engine, so immediate repeats are
// exact replications samplewise as well.
struct Branch {
    bool forced = false;
    Answer forced_answer = Answer::yes;
    double landing = 0.0;
    const BreakDensity* rho = nullptr;
};

Branch make_branch(const Scenario& scenario, const DichotomicMeasurement& m,
                   const UnitVector3& state, const std::string& context_key) {
    Branch b;
    if (state == m.axis.yes_anchor()) {
        b.forced = true;
        b.forced_answer = Answer::yes;
    } else if (state == m.axis.no_anchor()) {
        b.forced = true;
        b.forced_answer = Answer::no;
    } else {
        b.landing = landing_coordinate(state, m.axis);
        b.rho = &scenario.density_for(m, context_key);
    }
    return b;
}

}  // namespace

EmpiricalTable simulate_sequence(const Scenario& scenario, const SequenceSpec& sequence,
                                 const RunConfig& config) {
    if (config.samples == 0) throw std::invalid_argument("run config needs samples >= 1");
    if (config.chunk_size == 0) throw std::invalid_argument("run config needs chunk_size >= 1");
    validate_sequence(scenario, sequence);

    const std::size_t k = sequence.length();
    std::vector<std::array<Branch, 2>> step(k);
    step[0][0] = make_branch(scenario, scenario.measurement(sequence.step_ids[0]),
                             scenario.initial_state(), kInitialContext);
    for (std::size_t s = 1; s < k; ++s) {
        const auto& prev = scenario.measurement(sequence.step_ids[s - 1]);
        const auto& m = scenario.measurement(sequence.step_ids[s]);
        for (Answer prior : {Answer::yes, Answer::no}) {
            step[s][prior == Answer::no ? 1 : 0] =
                make_branch(scenario, m, post_state(prev, prior), OutcomeLabel{prev.id, prior}.key());
        }
    }

    const std::size_t n_outcomes = std::size_t{1} << k;
    const std::uint64_t n_chunks = (config.samples + config.chunk_size - 1) / config.chunk_size;
    std::vector<std::vector<std::uint64_t>> chunk_counts(
        n_chunks, std::vector<std::uint64_t>(n_outcomes, 0));

    for_each_chunk(config.samples, config.chunk_size,
                   [&](std::uint64_t chunk, std::uint64_t begin, std::uint64_t end) {
                       Rng rng = Rng::substream(config.seed, chunk);
                       auto& counts = chunk_counts[chunk];
                       for (std::uint64_t i = begin; i < end; ++i) {
                           std::size_t index = 0;
                           std::size_t prior = 0;
                           for (std::size_t s = 0; s < k; ++s) {
                               const Branch& b = step[s][s == 0 ? 0 : prior];
                               const Answer a = b.forced ? b.forced_answer
                                                         : cascade_outcome(b.landing, *b.rho, rng);
                               prior = a == Answer::no ? 1 : 0;
                               index = (index << 1) | prior;
                           }
                           ++counts[index];
                       }
                   });

    std::vector<std::uint64_t> totals(n_outcomes, 0);
    for (const auto& counts : chunk_counts) {
        for (std::size_t i = 0; i < n_outcomes; ++i) totals[i] += counts[i];
    }

    EmpiricalTable table;
    table.step_ids = sequence.step_ids;
    table.config = config;
    table.entries.reserve(n_outcomes);
    for (std::size_t i = 0; i < n_outcomes; ++i) {
        EmpiricalEntry e;
        e.outcome = outcome_string(ProbabilityTable::index_answers(i, k));
        e.count = totals[i];
        e.estimate = Estimate::from_frequency(totals[i], config.samples);
        table.entries.push_back(std::move(e));
    }
    return table;
}

}  // namespace gtr
