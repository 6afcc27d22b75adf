#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gtr/density.hpp"
#include "gtr/geometry.hpp"

namespace gtr {

enum class Answer { yes, no };

const char* to_string(Answer a);
Answer answer_from_string(std::string_view s);

struct OutcomeLabel {
    std::string measurement_id;
    Answer answer = Answer::yes;

    /// Context-key form, e.g. "A:yes".
    std::string key() const { return measurement_id + ":" + to_string(answer); }

    friend bool operator==(const OutcomeLabel&, const OutcomeLabel&) = default;
};

/// Raised when a sequential step needs a break density the scenario does not
/// define (and initial-fallback is off).
class MissingContextError : public std::out_of_range {
public:
    using Entry = std::pair<std::string, std::string>;  // (measurement id, context key)

    MissingContextError(std::string measurement_id, std::string context_key);
    explicit MissingContextError(std::vector<Entry> missing);

    const std::vector<Entry>& missing() const { return missing_; }

private:
    std::vector<Entry> missing_;
};

/// Break densities keyed by the prior context: "initial" for the first step
/// of a sequence, "<id>:<answer>" after an earlier outcome. The "initial"
/// entry is mandatory.
class ConditionalDensityMap {
public:
    explicit ConditionalDensityMap(std::map<std::string, BreakDensity> entries);

    bool contains(const std::string& context_key) const;
    const BreakDensity& at(const std::string& context_key) const;  // MissingContextError
    const std::map<std::string, BreakDensity>& entries() const { return entries_; }

private:
    std::map<std::string, BreakDensity> entries_;
};

struct DichotomicMeasurement {
    std::string id;
    MeasurementAxis axis;
    ConditionalDensityMap densities;
};

inline constexpr const char* kInitialContext = "initial";

class Scenario {
public:
    Scenario(UnitVector3 initial_state, std::vector<DichotomicMeasurement> measurements,
             bool default_to_initial = false);

    const UnitVector3& initial_state() const { return initial_state_; }
    const std::vector<DichotomicMeasurement>& measurements() const { return measurements_; }
    bool default_to_initial() const { return default_to_initial_; }

    bool has_measurement(const std::string& id) const;
    const DichotomicMeasurement& measurement(const std::string& id) const;

    /// Density for a context key, falling back to "initial" only when the
    /// scenario opted in via default_to_initial.
    const BreakDensity& density_for(const DichotomicMeasurement& m,
                                    const std::string& context_key) const;

private:
    UnitVector3 initial_state_;
    std::vector<DichotomicMeasurement> measurements_;
    bool default_to_initial_;
};

struct OutcomePair {
    double p_yes = 0.0;
    double p_no = 0.0;
};

/// Break-point probabilities for one measurement: the yes branch carries the
/// density mass below the landing coordinate, the no branch the mass above.
OutcomePair outcome_probabilities(const UnitVector3& state, const MeasurementAxis& axis,
                                  const BreakDensity& rho);
OutcomePair outcome_probabilities(const UnitVector3& state, const DichotomicMeasurement& m,
                                  const std::string& context_key);

/// Uniform-density special case: ((1+cos)/2, (1-cos)/2).
OutcomePair born_probabilities(double cos_theta);

/// Collapse: the state is drawn to the anchor of the obtained outcome.
UnitVector3 post_state(const DichotomicMeasurement& m, Answer answer);

}  // namespace gtr
