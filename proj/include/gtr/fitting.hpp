#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "gtr/geometry.hpp"
#include "gtr/measurement.hpp"
#include "gtr/sequential.hpp"

namespace gtr {

/// Which scenario field a free parameter controls.
enum class ParameterTarget {
    cos_theta_a,
    cos_theta_b,
    cos_theta,
    density_center,
    density_half_width,
    density_weight,
};

const char* to_string(ParameterTarget t);
ParameterTarget parameter_target_from_string(std::string_view s);

struct ParameterBinding {
    ParameterTarget target = ParameterTarget::cos_theta;
    std::string measurement_id;    // density_* targets only
    std::string context_key;       // density_* targets only
    std::size_t weight_index = 0;  // density_weight only
};

struct FreeParameter {
    std::string name;
    double lower = 0.0;
    double upper = 0.0;
    ParameterBinding binding;
};

/// Fixed two-measurement skeleton plus the list of free parameters. The
/// parameter value is the bound field's value; for density_weight the
/// remaining cells of that density rescale proportionally so the weights
/// keep summing to one (at least one cell per density must stay unbound).
struct FitSpec {
    ScenarioGeometry geometry;
    std::string a_id = "A";
    std::string b_id = "B";
    std::map<std::string, BreakDensity> a_densities;
    std::map<std::string, BreakDensity> b_densities;
    bool default_to_initial = false;
    std::vector<FreeParameter> free_parameters;
};

struct FitResult {
    std::map<std::string, double> parameters;
    double loss = 0.0;
    std::uint64_t evaluations = 0;
    bool converged = false;
};

void validate_fit_spec(const FitSpec& spec);
void validate_fit_targets(const FitSpec& spec, const ProbabilityTable& target_ab,
                          const ProbabilityTable& target_ba);

/// Scenario obtained by substituting parameter values into the skeleton.
/// Throws std::domain_error on an infeasible combination (the loss function
/// instead converts that into a penalty to keep the search total).
Scenario instantiate_scenario(const FitSpec& spec, const std::map<std::string, double>& params);

/// Sum of squared differences over the eight AB/BA entries; infeasible
/// geometry or densities yield 1e6 + violation.
double loss(const std::map<std::string, double>& params, const FitSpec& spec,
            const ProbabilityTable& target_ab, const ProbabilityTable& target_ba);

/// Multi-start Nelder-Mead in a logistic reparameterization of the bound
/// boxes, so every iterate stays feasible. Deterministic for a given seed:
/// restart r runs on substream(seed, r) and ties break on the lowest index.
FitResult fit(const FitSpec& spec, const ProbabilityTable& target_ab,
              const ProbabilityTable& target_ba, std::uint64_t restarts, std::uint64_t seed);

}  // namespace gtr
