#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "gtr/effects.hpp"
#include "gtr/ensemble.hpp"
#include "gtr/fitting.hpp"
#include "gtr/measurement.hpp"
#include "gtr/montecarlo.hpp"
#include "gtr/sequential.hpp"

namespace gtr::io {

using json = nlohmann::ordered_json;

/// Input rejected; path() names the offending JSON location, e.g.
/// "measurements[0].densities.initial.weights".
class ParseError : public std::runtime_error {
public:
    ParseError(std::string path, const std::string& message);

    const std::string& path() const { return path_; }

private:
    std::string path_;
};

BreakDensity density_from_json(const json& j, const std::string& path);
json density_to_json(const BreakDensity& d);

/// Scenario document: initial_state is either {"vector":[x,y,z]} with an
/// "axis" per measurement, or {"cosines":{"cos_theta_A":..,"cos_theta_B":..,
/// "cos_theta":..}} for exactly two measurements with implied axes.
Scenario scenario_from_json(const json& j);
/// Normalized (vector) form; re-parses to an identical scenario.
json scenario_to_json(const Scenario& scenario);
Scenario load_scenario(const std::string& file_path);

ProbabilityTable table_from_json(const json& j, const std::string& path);
json table_to_json(const ProbabilityTable& table);
json empirical_table_to_json(const EmpiricalTable& table);

/// CSV renderings; numeric cells match the JSON serialization digit for
/// digit. The outcome column is quoted (outcomes contain commas).
std::string table_to_csv(const ProbabilityTable& table);
std::string empirical_table_to_csv(const EmpiricalTable& table);

json estimate_to_json(const Estimate& estimate);
json effects_report_to_json(const EffectsReport& report);
json fit_result_to_json(const FitResult& result);

struct FitProblem {
    FitSpec spec;
    ProbabilityTable target_ab;
    ProbabilityTable target_ba;
    std::optional<std::uint64_t> restarts;
    std::optional<std::uint64_t> seed;
};

FitProblem fit_problem_from_json(const json& j);
FitProblem load_fit_problem(const std::string& file_path);

}  // namespace gtr::io
