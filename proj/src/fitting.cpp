#include "gtr/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>

#include "gtr/parallel.hpp"
#include "gtr/rng.hpp"

namespace gtr {

const char* to_string(ParameterTarget t) {
    switch (t) {
        case ParameterTarget::cos_theta_a: return "cos_theta_a";
        case ParameterTarget::cos_theta_b: return "cos_theta_b";
        case ParameterTarget::cos_theta: return "cos_theta";
        case ParameterTarget::density_center: return "density_center";
        case ParameterTarget::density_half_width: return "density_half_width";
        case ParameterTarget::density_weight: return "density_weight";
    }
    throw std::invalid_argument("unknown parameter target");
}

ParameterTarget parameter_target_from_string(std::string_view s) {
    for (ParameterTarget t :
         {ParameterTarget::cos_theta_a, ParameterTarget::cos_theta_b, ParameterTarget::cos_theta,
          ParameterTarget::density_center, ParameterTarget::density_half_width,
          ParameterTarget::density_weight}) {
        if (s == to_string(t)) return t;
    }
    throw std::invalid_argument("unknown parameter target \"" + std::string(s) + "\"");
}

namespace {

constexpr double kPenaltyBase = 1e6;
constexpr double kGramTol = 1e-10;
constexpr double kConvergedLoss = 1e-8;

bool is_cosine(ParameterTarget t) {
    return t == ParameterTarget::cos_theta_a || t == ParameterTarget::cos_theta_b ||
           t == ParameterTarget::cos_theta;
}

const std::map<std::string, BreakDensity>& densities_of(const FitSpec& spec,
                                                        const std::string& measurement_id) {
    if (measurement_id == spec.a_id) return spec.a_densities;
    if (measurement_id == spec.b_id) return spec.b_densities;
    throw std::invalid_argument("parameter binds unknown measurement \"" + measurement_id + "\"");
}

void validate_binding(const FitSpec& spec, const FreeParameter& p) {
    const auto& b = p.binding;
    if (is_cosine(b.target)) {
        if (!b.measurement_id.empty() || !b.context_key.empty()) {
            throw std::invalid_argument("parameter \"" + p.name +
                                        "\": cosine targets take no measurement or context");
        }
        if (p.lower < -1.0 || p.upper > 1.0) {
            throw std::invalid_argument("parameter \"" + p.name +
                                        "\": cosine bounds must lie in [-1, 1]");
        }
        return;
    }
    const auto& densities = densities_of(spec, b.measurement_id);
    auto it = densities.find(b.context_key);
    if (it == densities.end()) {
        throw std::invalid_argument("parameter \"" + p.name + "\" binds missing context \"" +
                                    b.context_key + "\" of measurement \"" + b.measurement_id +
                                    "\"");
    }
    const BreakDensity& d = it->second;
    if (b.target == ParameterTarget::density_weight) {
        const auto* pc = std::get_if<PiecewiseConstant>(&d.form());
        if (!pc) {
            throw std::invalid_argument("parameter \"" + p.name +
                                        "\" binds a weight of a non-piecewise density");
        }
        if (b.weight_index >= pc->weights.size()) {
            throw std::invalid_argument("parameter \"" + p.name + "\": weight index " +
                                        std::to_string(b.weight_index) + " out of range");
        }
        if (p.lower < 0.0 || p.upper > 1.0) {
            throw std::invalid_argument("parameter \"" + p.name +
                                        "\": weight bounds must lie in [0, 1]");
        }
        return;
    }
    if (!std::holds_alternative<LocallyUniform>(d.form())) {
        throw std::invalid_argument("parameter \"" + p.name +
                                    "\" binds a center or width of a non-locally-uniform density");
    }
    if (b.target == ParameterTarget::density_center && (p.lower <= -1.0 || p.upper >= 1.0)) {
        throw std::invalid_argument("parameter \"" + p.name +
                                    "\": center bounds must lie inside (-1, 1)");
    }
    if (b.target == ParameterTarget::density_half_width && (p.lower <= 0.0 || p.upper > 1.0)) {
        throw std::invalid_argument("parameter \"" + p.name +
                                    "\": half-width bounds must lie in (0, 1]");
    }
}

std::string binding_slot(const ParameterBinding& b) {
    return std::string(to_string(b.target)) + "|" + b.measurement_id + "|" + b.context_key + "|" +
           (b.target == ParameterTarget::density_weight ? std::to_string(b.weight_index) : "");
}

// Patch of one conditional density accumulated from the free parameters.
struct DensityPatch {
    std::optional<double> center;
    std::optional<double> half_width;
    std::vector<std::pair<std::size_t, double>> weights;
};

struct Materialized {
    double violation = 0.0;
    std::optional<Scenario> scenario;
};

Materialized materialize(const FitSpec& spec, const std::vector<double>& values) {
    double ca = spec.geometry.cos_theta_a;
    double cb = spec.geometry.cos_theta_b;
    double c = spec.geometry.cos_theta;
    std::map<std::pair<std::string, std::string>, DensityPatch> patches;

    for (std::size_t i = 0; i < spec.free_parameters.size(); ++i) {
        const auto& b = spec.free_parameters[i].binding;
        const double v = values[i];
        switch (b.target) {
            case ParameterTarget::cos_theta_a: ca = v; break;
            case ParameterTarget::cos_theta_b: cb = v; break;
            case ParameterTarget::cos_theta: c = v; break;
            case ParameterTarget::density_center:
                patches[{b.measurement_id, b.context_key}].center = v;
                break;
            case ParameterTarget::density_half_width:
                patches[{b.measurement_id, b.context_key}].half_width = v;
                break;
            case ParameterTarget::density_weight:
                patches[{b.measurement_id, b.context_key}].weights.emplace_back(b.weight_index, v);
                break;
        }
    }

    double violation = 0.0;
    for (double cosine : {ca, cb, c}) {
        if (std::abs(cosine) > 1.0) violation += std::abs(cosine) - 1.0;
    }
    if (violation == 0.0) {
        const double det = 1.0 + 2.0 * ca * cb * c - ca * ca - cb * cb - c * c;
        if (det < -kGramTol) violation += -det;
    }

    auto patched = [&](const std::map<std::string, BreakDensity>& skeleton,
                       const std::string& id) {
        std::map<std::string, BreakDensity> out = skeleton;
        for (const auto& [slot, patch] : patches) {
            if (slot.first != id) continue;
            const BreakDensity& base = skeleton.at(slot.second);
            if (patch.center || patch.half_width) {
                const auto& lu = std::get<LocallyUniform>(base.form());
                const double center = patch.center.value_or(lu.center);
                const double hw = patch.half_width.value_or(lu.half_width);
                if (center - hw < -1.0) violation += -1.0 - (center - hw);
                if (center + hw > 1.0) violation += (center + hw) - 1.0;
                if (violation == 0.0) out.insert_or_assign(slot.second, BreakDensity::locally_uniform(center, hw));
            }
            if (!patch.weights.empty()) {
                const auto& pc = std::get<PiecewiseConstant>(base.form());
                std::vector<double> w = pc.weights;
                std::vector<bool> bound(w.size(), false);
                double sum_free = 0.0;
                for (const auto& [index, value] : patch.weights) {
                    w[index] = value;
                    bound[index] = true;
                    sum_free += value;
                }
                if (sum_free > 1.0) {
                    violation += sum_free - 1.0;
                    continue;
                }
                const double remaining = 1.0 - sum_free;
                double unbound_sum = 0.0;
                std::size_t n_unbound = 0;
                for (std::size_t k = 0; k < w.size(); ++k) {
                    if (!bound[k]) {
                        unbound_sum += pc.weights[k];
                        ++n_unbound;
                    }
                }
                for (std::size_t k = 0; k < w.size(); ++k) {
                    if (bound[k]) continue;
                    w[k] = unbound_sum > 0.0 ? pc.weights[k] * remaining / unbound_sum
                                             : remaining / static_cast<double>(n_unbound);
                }
                out.insert_or_assign(slot.second, BreakDensity::piecewise(pc.breakpoints, std::move(w)));
            }
        }
        return out;
    };

    auto a_map = patched(spec.a_densities, spec.a_id);
    auto b_map = patched(spec.b_densities, spec.b_id);
    if (violation > 0.0) return {violation, std::nullopt};

    const EmbeddedGeometry emb = embed({ca, cb, c});
    std::vector<DichotomicMeasurement> measurements;
    measurements.push_back({spec.a_id, MeasurementAxis{emb.a_yes}, ConditionalDensityMap(std::move(a_map))});
    measurements.push_back({spec.b_id, MeasurementAxis{emb.b_yes}, ConditionalDensityMap(std::move(b_map))});
    return {0.0, Scenario(emb.state, std::move(measurements), spec.default_to_initial)};
}

double objective(const FitSpec& spec, const ProbabilityTable& target_ab,
                 const ProbabilityTable& target_ba, const std::vector<double>& values) {
    const Materialized m = materialize(spec, values);
    if (!m.scenario) return kPenaltyBase + m.violation;
    const auto ab = sequence_distribution(*m.scenario, SequenceSpec{{spec.a_id, spec.b_id}});
    const auto ba = sequence_distribution(*m.scenario, SequenceSpec{{spec.b_id, spec.a_id}});
    double sse = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        const double da = ab.probabilities()[i] - target_ab.probabilities()[i];
        const double db = ba.probabilities()[i] - target_ba.probabilities()[i];
        sse += da * da + db * db;
    }
    return sse;
}

std::vector<double> values_from_map(const FitSpec& spec,
                                    const std::map<std::string, double>& params) {
    if (params.size() != spec.free_parameters.size()) {
        throw std::invalid_argument("expected " + std::to_string(spec.free_parameters.size()) +
                                    " parameter values, got " + std::to_string(params.size()));
    }
    std::vector<double> values;
    values.reserve(spec.free_parameters.size());
    for (const auto& p : spec.free_parameters) {
        auto it = params.find(p.name);
        if (it == params.end()) {
            throw std::invalid_argument("missing value for parameter \"" + p.name + "\"");
        }
        if (!(it->second >= p.lower && it->second <= p.upper)) {
            throw std::invalid_argument("parameter \"" + p.name + "\" outside its bounds");
        }
        values.push_back(it->second);
    }
    return values;
}

// Logistic map between the unconstrained search space and a bound box.
double to_external(double t, double lower, double upper) {
    const double tc = std::clamp(t, -40.0, 40.0);
    return lower + (upper - lower) / (1.0 + std::exp(-tc));
}

struct NmOutcome {
    std::vector<double> point;
    double value = 0.0;
    std::uint64_t evaluations = 0;
};

NmOutcome nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                      const std::vector<double>& start, double step, std::uint64_t budget) {
    const std::size_t n = start.size();
    struct Vertex {
        std::vector<double> x;
        double f;
    };
    std::vector<Vertex> simplex;
    simplex.reserve(n + 1);
    std::uint64_t evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        ++evals;
        return f(x);
    };
    simplex.push_back({start, eval(start)});
    for (std::size_t i = 0; i < n; ++i) {
        auto x = start;
        x[i] += step;
        simplex.push_back({x, eval(x)});
    }

    auto by_value = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };
    while (true) {
        std::stable_sort(simplex.begin(), simplex.end(), by_value);
        const double fbest = simplex.front().f;
        const double fworst = simplex.back().f;
        if (fbest < 1e-16 || fworst - fbest < 1e-15 || evals >= budget) break;

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t d = 0; d < n; ++d) centroid[d] += simplex[i].x[d];
        }
        for (double& cd : centroid) cd /= static_cast<double>(n);
        const auto& worst = simplex.back().x;

        auto blend = [&](double coef) {
            std::vector<double> x(n);
            for (std::size_t d = 0; d < n; ++d) x[d] = centroid[d] + coef * (centroid[d] - worst[d]);
            return x;
        };

        const auto reflected = blend(1.0);
        const double fr = eval(reflected);
        if (fr < fbest) {
            const auto expanded = blend(2.0);
            const double fe = eval(expanded);
            simplex.back() = fe < fr ? Vertex{expanded, fe} : Vertex{reflected, fr};
            continue;
        }
        if (fr < simplex[n - 1].f) {
            simplex.back() = {reflected, fr};
            continue;
        }
        const auto contracted = fr < fworst ? blend(0.5) : blend(-0.5);
        const double fc = eval(contracted);
        if (fc < std::min(fr, fworst)) {
            simplex.back() = {contracted, fc};
            continue;
        }
        for (std::size_t i = 1; i <= n; ++i) {
            for (std::size_t d = 0; d < n; ++d) {
                simplex[i].x[d] = simplex[0].x[d] + 0.5 * (simplex[i].x[d] - simplex[0].x[d]);
            }
            simplex[i].f = eval(simplex[i].x);
        }
    }
    std::stable_sort(simplex.begin(), simplex.end(), by_value);
    return {simplex.front().x, simplex.front().f, evals};
}

}  // namespace

void validate_fit_spec(const FitSpec& spec) {
    if (spec.a_id.empty() || spec.b_id.empty() || spec.a_id == spec.b_id) {
        throw std::invalid_argument("fit spec needs two distinct measurement ids");
    }
    if (!spec.a_densities.count(kInitialContext) || !spec.b_densities.count(kInitialContext)) {
        throw std::invalid_argument("fit spec densities must define an \"initial\" entry");
    }
    std::set<std::string> names;
    std::set<std::string> slots;
    std::map<std::string, std::set<std::size_t>> bound_weights;
    for (const auto& p : spec.free_parameters) {
        if (p.name.empty()) throw std::invalid_argument("free parameter with empty name");
        if (!names.insert(p.name).second) {
            throw std::invalid_argument("duplicate parameter name \"" + p.name + "\"");
        }
        if (!(std::isfinite(p.lower) && std::isfinite(p.upper) && p.lower < p.upper)) {
            throw std::invalid_argument("parameter \"" + p.name +
                                        "\" needs finite bounds with lower < upper");
        }
        validate_binding(spec, p);
        if (!slots.insert(binding_slot(p.binding)).second) {
            throw std::invalid_argument("parameter \"" + p.name +
                                        "\" binds an already-bound scenario field");
        }
        if (p.binding.target == ParameterTarget::density_weight) {
            bound_weights[p.binding.measurement_id + "|" + p.binding.context_key].insert(
                p.binding.weight_index);
        }
    }
    for (const auto& [slot, indices] : bound_weights) {
        const auto sep = slot.find('|');
        const auto& densities = densities_of(spec, slot.substr(0, sep));
        const auto& pc = std::get<PiecewiseConstant>(densities.at(slot.substr(sep + 1)).form());
        if (indices.size() >= pc.weights.size()) {
            throw std::invalid_argument("density " + slot.substr(0, sep) + "/" +
                                        slot.substr(sep + 1) +
                                        " needs at least one unbound weight cell");
        }
    }
    // A fixed-geometry skeleton must itself be realizable.
    bool geometry_free = false;
    for (const auto& p : spec.free_parameters) geometry_free |= is_cosine(p.binding.target);
    if (!geometry_free &&
        !gram_realizable(spec.geometry.cos_theta_a, spec.geometry.cos_theta_b,
                         spec.geometry.cos_theta)) {
        throw std::invalid_argument("fit spec skeleton geometry is not realizable");
    }
}

void validate_fit_targets(const FitSpec& spec, const ProbabilityTable& target_ab,
                          const ProbabilityTable& target_ba) {
    const std::vector<std::string> ab{spec.a_id, spec.b_id};
    const std::vector<std::string> ba{spec.b_id, spec.a_id};
    if (target_ab.step_ids() != ab || target_ba.step_ids() != ba) {
        throw std::invalid_argument(
            "targets must cover the fitted measurement pair in opposite orders");
    }
}

Scenario instantiate_scenario(const FitSpec& spec, const std::map<std::string, double>& params) {
    validate_fit_spec(spec);
    const Materialized m = materialize(spec, values_from_map(spec, params));
    if (!m.scenario) {
        throw std::domain_error("parameters instantiate an infeasible scenario (violation " +
                                std::to_string(m.violation) + ")");
    }
    return *m.scenario;
}

double loss(const std::map<std::string, double>& params, const FitSpec& spec,
            const ProbabilityTable& target_ab, const ProbabilityTable& target_ba) {
    validate_fit_spec(spec);
    validate_fit_targets(spec, target_ab, target_ba);
    return objective(spec, target_ab, target_ba, values_from_map(spec, params));
}

FitResult fit(const FitSpec& spec, const ProbabilityTable& target_ab,
              const ProbabilityTable& target_ba, std::uint64_t restarts, std::uint64_t seed) {
    validate_fit_spec(spec);
    validate_fit_targets(spec, target_ab, target_ba);
    if (restarts == 0) throw std::invalid_argument("fit needs restarts >= 1");
    for (const ProbabilityTable* t : {&target_ab, &target_ba}) {
        double sum = 0.0;
        for (double p : t->probabilities()) sum += p;
        if (std::abs(sum - 1.0) > 1e-9) {
            throw std::invalid_argument("target table probabilities must sum to 1");
        }
    }

    const std::size_t n = spec.free_parameters.size();
    FitResult result;
    if (n == 0) {
        result.loss = objective(spec, target_ab, target_ba, {});
        result.evaluations = 1;
        result.converged = result.loss < kConvergedLoss;
        return result;
    }

    auto internal_objective = [&](const std::vector<double>& t) {
        std::vector<double> values(n);
        for (std::size_t i = 0; i < n; ++i) {
            values[i] = to_external(t[i], spec.free_parameters[i].lower,
                                    spec.free_parameters[i].upper);
        }
        return objective(spec, target_ab, target_ba, values);
    };

    constexpr std::uint64_t kRestartBudget = 2000;
    struct RestartOutcome {
        std::vector<double> point;
        double value = 0.0;
        std::uint64_t evaluations = 0;
    };
    std::vector<RestartOutcome> outcomes(restarts);

    for_each_chunk(restarts, 1, [&](std::uint64_t r, std::uint64_t, std::uint64_t) {
        Rng rng = Rng::substream(seed, r);
        std::vector<double> start(n);
        for (double& t : start) {
            const double u = 0.02 + 0.96 * rng.next_uniform();
            t = std::log(u / (1.0 - u));
        }
        NmOutcome coarse = nelder_mead(internal_objective, start, 1.0, kRestartBudget);
        NmOutcome polished = nelder_mead(internal_objective, coarse.point, 0.25, kRestartBudget);
        outcomes[r] = {polished.point, polished.value, coarse.evaluations + polished.evaluations};
    });

    std::size_t best = 0;
    for (std::size_t r = 1; r < restarts; ++r) {
        result.evaluations += outcomes[r].evaluations;
        if (outcomes[r].value < outcomes[best].value) best = r;
    }
    result.evaluations += outcomes[0].evaluations;

    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = spec.free_parameters[i];
        result.parameters[p.name] = to_external(outcomes[best].point[i], p.lower, p.upper);
    }
    result.loss = objective(spec, target_ab, target_ba, values_from_map(spec, result.parameters));
    result.evaluations += 1;
    result.converged = result.loss < kConvergedLoss;
    return result;
}

}  // namespace gtr
