#include "gtr/sequential.hpp"

#include <algorithm>
#include <array>
#include <sstream>

namespace gtr {

namespace {

constexpr std::size_t kMaxSequenceLength = 24;

std::vector<std::string> split_csv(std::string_view text) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = text.find(',', start);
        std::string_view token = text.substr(start, comma - start);
        while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
        while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
        parts.emplace_back(token);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return parts;
}

}  // namespace

SequenceSpec SequenceSpec::parse(std::string_view text) {
    SequenceSpec spec{split_csv(text)};
    for (const auto& id : spec.step_ids) {
        if (id.empty()) {
            throw std::invalid_argument("sequence \"" + std::string(text) +
                                        "\" contains an empty measurement id");
        }
    }
    return spec;
}

std::string SequenceSpec::to_string() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < step_ids.size(); ++i) {
        if (i > 0) out << ",";
        out << step_ids[i];
    }
    return out.str();
}

std::string outcome_string(const std::vector<Answer>& answers) {
    std::ostringstream out;
    for (std::size_t i = 0; i < answers.size(); ++i) {
        if (i > 0) out << ",";
        out << gtr::to_string(answers[i]);
    }
    return out.str();
}

std::string labeled_outcome_string(const std::vector<std::string>& step_ids,
                                   const std::vector<Answer>& answers) {
    if (step_ids.size() != answers.size()) {
        throw std::invalid_argument("outcome length does not match the step list");
    }
    std::ostringstream out;
    for (std::size_t i = 0; i < answers.size(); ++i) {
        if (i > 0) out << ",";
        out << OutcomeLabel{step_ids[i], answers[i]}.key();
    }
    return out.str();
}

std::vector<Answer> answers_from_outcome_string(std::string_view text,
                                                std::size_t expected_length) {
    const auto tokens = split_csv(text);
    if (tokens.size() != expected_length) {
        throw std::invalid_argument("outcome \"" + std::string(text) + "\" has " +
                                    std::to_string(tokens.size()) + " answers, expected " +
                                    std::to_string(expected_length));
    }
    std::vector<Answer> answers;
    answers.reserve(tokens.size());
    for (const auto& token : tokens) {
        // Accept the bare answer ("yes") and the labeled form ("A:yes").
        const std::size_t colon = token.rfind(':');
        answers.push_back(
            answer_from_string(colon == std::string::npos ? token : token.substr(colon + 1)));
    }
    return answers;
}

ProbabilityTable::ProbabilityTable(std::vector<std::string> step_ids,
                                   std::vector<double> probabilities)
    : step_ids_(std::move(step_ids)), probabilities_(std::move(probabilities)) {
    if (step_ids_.empty() || step_ids_.size() > kMaxSequenceLength) {
        throw std::invalid_argument("probability table needs 1.." +
                                    std::to_string(kMaxSequenceLength) + " steps");
    }
    const std::size_t expected = std::size_t{1} << step_ids_.size();
    if (probabilities_.size() != expected) {
        throw std::invalid_argument("probability table over " + std::to_string(step_ids_.size()) +
                                    " steps needs " + std::to_string(expected) + " entries, got " +
                                    std::to_string(probabilities_.size()));
    }
    for (double p : probabilities_) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw std::invalid_argument("probability table entries must lie in [0, 1]");
        }
    }
}

double ProbabilityTable::probability(const std::string& outcome) const {
    return probability(answers_from_outcome_string(outcome, step_ids_.size()));
}

double ProbabilityTable::probability(const std::vector<Answer>& answers) const {
    if (answers.size() != step_ids_.size()) {
        throw std::invalid_argument("outcome length does not match table");
    }
    return probabilities_[answer_index(answers)];
}

std::size_t ProbabilityTable::answer_index(const std::vector<Answer>& answers) {
    std::size_t index = 0;
    for (Answer a : answers) index = (index << 1) | (a == Answer::no ? 1 : 0);
    return index;
}

std::vector<Answer> ProbabilityTable::index_answers(std::size_t index, std::size_t length) {
    std::vector<Answer> answers(length, Answer::yes);
    for (std::size_t s = 0; s < length; ++s) {
        if (index >> (length - 1 - s) & 1) answers[s] = Answer::no;
    }
    return answers;
}

OutcomePair conditional_probabilities(const Scenario& scenario, const DichotomicMeasurement& m,
                                      const UnitVector3& state, const std::string& context_key) {
    if (state == m.axis.yes_anchor()) return {1.0, 0.0};
    if (state == m.axis.no_anchor()) return {0.0, 1.0};
    return outcome_probabilities(state, m.axis, scenario.density_for(m, context_key));
}

void validate_sequence(const Scenario& scenario, const SequenceSpec& sequence) {
    if (sequence.length() == 0) {
        throw std::invalid_argument("sequence needs at least one step");
    }
    if (sequence.length() > kMaxSequenceLength) {
        throw std::invalid_argument("sequence of " + std::to_string(sequence.length()) +
                                    " steps exceeds the supported maximum of " +
                                    std::to_string(kMaxSequenceLength));
    }
    for (const auto& id : sequence.step_ids) {
        if (!scenario.has_measurement(id)) {
            throw std::invalid_argument("sequence refers to unknown measurement \"" + id + "\"");
        }
    }

    std::vector<MissingContextError::Entry> missing;
    for (std::size_t s = 1; s < sequence.length(); ++s) {
        const auto& prev = scenario.measurement(sequence.step_ids[s - 1]);
        const auto& m = scenario.measurement(sequence.step_ids[s]);
        for (Answer prior : {Answer::yes, Answer::no}) {
            const UnitVector3 entering = post_state(prev, prior);
            if (entering == m.axis.yes_anchor() || entering == m.axis.no_anchor()) continue;
            const std::string key = OutcomeLabel{prev.id, prior}.key();
            if (m.densities.contains(key) || scenario.default_to_initial()) continue;
            MissingContextError::Entry entry{m.id, key};
            if (std::find(missing.begin(), missing.end(), entry) == missing.end()) {
                missing.push_back(entry);
            }
        }
    }
    if (!missing.empty()) throw MissingContextError(std::move(missing));
}

ProbabilityTable sequence_distribution(const Scenario& scenario, const SequenceSpec& sequence) {
    validate_sequence(scenario, sequence);
    const std::size_t k = sequence.length();

    // Conditionals for step s given the prior answer; step 0 ignores the
    // "no" slot and conditions on the initial state instead.
    std::vector<std::array<OutcomePair, 2>> step(k);
    {
        const auto& first = scenario.measurement(sequence.step_ids[0]);
        step[0][0] = conditional_probabilities(scenario, first, scenario.initial_state(),
                                               kInitialContext);
    }
    for (std::size_t s = 1; s < k; ++s) {
        const auto& prev = scenario.measurement(sequence.step_ids[s - 1]);
        const auto& m = scenario.measurement(sequence.step_ids[s]);
        for (Answer prior : {Answer::yes, Answer::no}) {
            step[s][prior == Answer::no ? 1 : 0] = conditional_probabilities(
                scenario, m, post_state(prev, prior), OutcomeLabel{prev.id, prior}.key());
        }
    }

    std::vector<double> probabilities(std::size_t{1} << k, 0.0);
    for (std::size_t index = 0; index < probabilities.size(); ++index) {
        const auto answers = ProbabilityTable::index_answers(index, k);
        double p = answers[0] == Answer::yes ? step[0][0].p_yes : step[0][0].p_no;
        for (std::size_t s = 1; s < k && p > 0.0; ++s) {
            const OutcomePair& cond = step[s][answers[s - 1] == Answer::no ? 1 : 0];
            p *= answers[s] == Answer::yes ? cond.p_yes : cond.p_no;
        }
        probabilities[index] = p;
    }
    return ProbabilityTable(sequence.step_ids, std::move(probabilities));
}

}  // namespace gtr
