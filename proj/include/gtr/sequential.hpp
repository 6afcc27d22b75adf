#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gtr/measurement.hpp"

namespace gtr {

/// An ordered list of measurement ids, e.g. {"A", "B"} for "measure A, then B".
/// Repeats are allowed ("A,B,A").
struct SequenceSpec {
    std::vector<std::string> step_ids;

    static SequenceSpec parse(std::string_view text);  // comma-separated ids
    std::string to_string() const;

    std::size_t length() const { return step_ids.size(); }
};

/// Joint outcome string for one path through a sequence: "yes,no" means first
/// step answered yes, second answered no. The labeled form carries the
/// measurement ids as well: "A:yes,B:no". Parsing accepts both.
std::string outcome_string(const std::vector<Answer>& answers);
std::string labeled_outcome_string(const std::vector<std::string>& step_ids,
                                   const std::vector<Answer>& answers);
std::vector<Answer> answers_from_outcome_string(std::string_view text, std::size_t expected_length);

/// Joint distribution over the 2^k outcome paths of a k-step sequence.
/// Entries are ordered with the first step as the most significant bit and
/// yes before no, so for two steps: "yes,yes", "yes,no", "no,yes", "no,no".
class ProbabilityTable {
public:
    ProbabilityTable() = default;
    ProbabilityTable(std::vector<std::string> step_ids, std::vector<double> probabilities);

    const std::vector<std::string>& step_ids() const { return step_ids_; }
    const std::vector<double>& probabilities() const { return probabilities_; }
    std::size_t length() const { return step_ids_.size(); }

    double probability(const std::string& outcome) const;
    double probability(const std::vector<Answer>& answers) const;

    /// Row index of an outcome path; inverse of index_answers.
    static std::size_t answer_index(const std::vector<Answer>& answers);
    static std::vector<Answer> index_answers(std::size_t index, std::size_t length);

private:
    std::vector<std::string> step_ids_;
    std::vector<double> probabilities_;
};

/// Per-step conditionals for one measurement given the prior outcome: the
/// state entering the step is the prior anchor, so the landing coordinate is
/// +cos(theta) after a shared-"yes" anchor and -cos(theta) after "no".
/// Measuring the same id twice in a row is deterministic (the state already
/// sits on an anchor), giving (1,0) or (0,1) without consulting a density.
OutcomePair conditional_probabilities(const Scenario& scenario, const DichotomicMeasurement& m,
                                      const UnitVector3& state, const std::string& context_key);

/// Checks a sequence is computable: all ids exist and every reachable context
/// has a density. Throws MissingContextError listing every missing key, or
/// std::invalid_argument for unknown ids / oversized sequences.
void validate_sequence(const Scenario& scenario, const SequenceSpec& sequence);

/// Exact joint distribution by the product rule: each path multiplies the
/// first-step probability with the per-step conditionals along it.
ProbabilityTable sequence_distribution(const Scenario& scenario, const SequenceSpec& sequence);

}  // namespace gtr
