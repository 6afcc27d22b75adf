#include "gtr/measurement.hpp"

#include <sstream>
#include <utility>

namespace gtr {

const char* to_string(Answer a) { return a == Answer::yes ? "yes" : "no"; }

Answer answer_from_string(std::string_view s) {
    if (s == "yes") return Answer::yes;
    if (s == "no") return Answer::no;
    throw std::invalid_argument("answer must be \"yes\" or \"no\", got \"" + std::string(s) + "\"");
}

namespace {

std::string missing_context_message(const std::vector<MissingContextError::Entry>& missing) {
    std::ostringstream out;
    if (missing.size() == 1) {
        out << "measurement \"" << missing[0].first << "\" has no break density for context \""
            << missing[0].second << "\"";
        return out.str();
    }
    out << "missing break densities:";
    for (std::size_t i = 0; i < missing.size(); ++i) {
        if (i > 0) out << ";";
        out << " measurement \"" << missing[i].first << "\" context \"" << missing[i].second
            << "\"";
    }
    return out.str();
}

}  // namespace

MissingContextError::MissingContextError(std::string measurement_id, std::string context_key)
    : MissingContextError(std::vector<Entry>{{std::move(measurement_id), std::move(context_key)}}) {}

MissingContextError::MissingContextError(std::vector<Entry> missing)
    : std::out_of_range(missing_context_message(missing)), missing_(std::move(missing)) {}

ConditionalDensityMap::ConditionalDensityMap(std::map<std::string, BreakDensity> entries)
    : entries_(std::move(entries)) {
    if (!entries_.count(kInitialContext)) {
        throw std::invalid_argument("conditional density map must define an \"initial\" entry");
    }
}

bool ConditionalDensityMap::contains(const std::string& context_key) const {
    return entries_.count(context_key) > 0;
}

const BreakDensity& ConditionalDensityMap::at(const std::string& context_key) const {
    auto it = entries_.find(context_key);
    if (it == entries_.end()) throw MissingContextError("", context_key);
    return it->second;
}

Scenario::Scenario(UnitVector3 initial_state, std::vector<DichotomicMeasurement> measurements,
                   bool default_to_initial)
    : initial_state_(initial_state),
      measurements_(std::move(measurements)),
      default_to_initial_(default_to_initial) {
    if (measurements_.empty()) {
        throw std::invalid_argument("scenario needs at least one measurement");
    }
    for (std::size_t i = 0; i < measurements_.size(); ++i) {
        for (std::size_t j = i + 1; j < measurements_.size(); ++j) {
            if (measurements_[i].id == measurements_[j].id) {
                throw std::invalid_argument("duplicate measurement id \"" + measurements_[i].id +
                                            "\"");
            }
        }
    }
}

bool Scenario::has_measurement(const std::string& id) const {
    for (const auto& m : measurements_) {
        if (m.id == id) return true;
    }
    return false;
}

const DichotomicMeasurement& Scenario::measurement(const std::string& id) const {
    for (const auto& m : measurements_) {
        if (m.id == id) return m;
    }
    throw std::out_of_range("scenario has no measurement \"" + id + "\"");
}

const BreakDensity& Scenario::density_for(const DichotomicMeasurement& m,
                                          const std::string& context_key) const {
    if (m.densities.contains(context_key)) return m.densities.at(context_key);
    if (default_to_initial_) return m.densities.at(kInitialContext);
    throw MissingContextError(m.id, context_key);
}

OutcomePair outcome_probabilities(const UnitVector3& state, const MeasurementAxis& axis,
                                  const BreakDensity& rho) {
    const double landing = landing_coordinate(state, axis);
    const double p_yes = rho.cdf(landing);
    return {p_yes, 1.0 - p_yes};
}

OutcomePair outcome_probabilities(const UnitVector3& state, const DichotomicMeasurement& m,
                                  const std::string& context_key) {
    if (!m.densities.contains(context_key)) throw MissingContextError(m.id, context_key);
    return outcome_probabilities(state, m.axis, m.densities.at(context_key));
}

OutcomePair born_probabilities(double cos_theta) {
    if (!(cos_theta >= -1.0 && cos_theta <= 1.0)) {
        throw std::domain_error("cos_theta must lie in [-1, 1]");
    }
    return {0.5 * (1.0 + cos_theta), 0.5 * (1.0 - cos_theta)};
}

UnitVector3 post_state(const DichotomicMeasurement& m, Answer answer) {
    return answer == Answer::yes ? m.axis.yes_anchor() : m.axis.no_anchor();
}

}  // namespace gtr
