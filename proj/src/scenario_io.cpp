#include "gtr/scenario_io.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

namespace gtr::io {

namespace {

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

std::string at_index(const std::string& path, std::size_t i) {
    return path + "[" + std::to_string(i) + "]";
}

[[noreturn]] void fail(const std::string& path, const std::string& message) {
    throw ParseError(path, message);
}

const json& member(const json& j, const char* key, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(path, std::string("missing key \"") + key + "\"");
    return *it;
}

double number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

double number_member(const json& j, const char* key, const std::string& path) {
    return number(member(j, key, path), join(path, key));
}

std::string string_member(const json& j, const char* key, const std::string& path) {
    const json& v = member(j, key, path);
    if (!v.is_string()) fail(join(path, key), "expected a string");
    return v.get<std::string>();
}

std::uint64_t unsigned_member(const json& j, const char* key, const std::string& path) {
    const json& v = member(j, key, path);
    if (!v.is_number_unsigned()) fail(join(path, key), "expected a nonnegative integer");
    return v.get<std::uint64_t>();
}

bool bool_member_or(const json& j, const char* key, bool fallback) {
    if (!j.is_object() || !j.contains(key)) return fallback;
    const json& v = j[key];
    if (!v.is_boolean()) fail(key, "expected a boolean");
    return v.get<bool>();
}

std::vector<double> number_array(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], at_index(path, i)));
    return out;
}

UnitVector3 vector_from_json(const json& j, const std::string& path) {
    const auto v = number_array(j, path);
    if (v.size() != 3) fail(path, "expected exactly three components");
    try {
        return UnitVector3::normalized(v[0], v[1], v[2]);
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
}

json vector_to_json(const UnitVector3& v) { return json::array({v.x(), v.y(), v.z()}); }

std::string number_text(double x) { return json(x).dump(); }

}  // namespace

ParseError::ParseError(std::string path, const std::string& message)
    : std::runtime_error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}

BreakDensity density_from_json(const json& j, const std::string& path) {
    const std::string type = string_member(j, "type", path);
    if (type == "uniform") return BreakDensity::uniform();
    if (type == "locally_uniform") {
        const double center = number_member(j, "center", path);
        const double half_width = number_member(j, "half_width", path);
        if (!(half_width > 0.0)) fail(join(path, "half_width"), "must be > 0");
        if (!(center > -1.0 && center < 1.0)) fail(join(path, "center"), "must lie in (-1, 1)");
        if (center - half_width < -1.0 || center + half_width > 1.0) {
            fail(path, "support must stay inside [-1, 1]");
        }
        return BreakDensity::locally_uniform(center, half_width);
    }
    if (type == "piecewise") {
        const std::string bp_path = join(path, "breakpoints");
        const std::string w_path = join(path, "weights");
        auto breakpoints = number_array(member(j, "breakpoints", path), bp_path);
        auto weights = number_array(member(j, "weights", path), w_path);
        if (breakpoints.size() < 2) fail(bp_path, "need at least two breakpoints");
        if (breakpoints.front() != -1.0 || breakpoints.back() != 1.0) {
            fail(bp_path, "must start at -1 and end at 1");
        }
        for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
            if (!(breakpoints[i] < breakpoints[i + 1])) {
                fail(bp_path, "must be strictly increasing");
            }
        }
        if (weights.size() + 1 != breakpoints.size()) {
            fail(w_path,
                 "need one weight per cell (" + std::to_string(breakpoints.size() - 1) + ")");
        }
        double sum = 0.0;
        for (double w : weights) {
            if (!(w >= 0.0)) fail(w_path, "must be nonnegative");
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-12) fail(w_path, "must sum to 1");
        return BreakDensity::piecewise(std::move(breakpoints), std::move(weights));
    }
    fail(join(path, "type"), "unknown density type \"" + type + "\"");
}

json density_to_json(const BreakDensity& d) {
    json out = json::object();
    if (std::holds_alternative<Uniform>(d.form())) {
        out["type"] = "uniform";
        return out;
    }
    if (const auto* lu = std::get_if<LocallyUniform>(&d.form())) {
        out["type"] = "locally_uniform";
        out["center"] = lu->center;
        out["half_width"] = lu->half_width;
        return out;
    }
    const auto& pc = std::get<PiecewiseConstant>(d.form());
    out["type"] = "piecewise";
    out["breakpoints"] = pc.breakpoints;
    out["weights"] = pc.weights;
    return out;
}

Scenario scenario_from_json(const json& j) {
    if (!j.is_object()) fail("", "expected a scenario object");
    const bool default_to_initial = bool_member_or(j, "default_to_initial", false);

    const json& ms = member(j, "measurements", "");
    if (!ms.is_array() || ms.empty()) fail("measurements", "expected a nonempty array");

    struct RawMeasurement {
        std::string id;
        std::optional<UnitVector3> axis;
        std::map<std::string, BreakDensity> densities;
    };
    std::vector<RawMeasurement> raw;
    std::set<std::string> seen_ids;
    for (std::size_t i = 0; i < ms.size(); ++i) {
        const std::string mp = at_index("measurements", i);
        const json& mj = ms[i];
        if (!mj.is_object()) fail(mp, "expected an object");
        RawMeasurement m;
        m.id = string_member(mj, "id", mp);
        if (m.id.empty()) fail(join(mp, "id"), "must be nonempty");
        if (m.id.find(',') != std::string::npos || m.id.find(':') != std::string::npos) {
            fail(join(mp, "id"), "must not contain ',' or ':'");
        }
        if (!seen_ids.insert(m.id).second) {
            fail(join(mp, "id"), "duplicate measurement id \"" + m.id + "\"");
        }
        if (mj.contains("axis")) m.axis = vector_from_json(mj["axis"], join(mp, "axis"));
        const std::string dp = join(mp, "densities");
        const json& densities = member(mj, "densities", mp);
        if (!densities.is_object()) fail(dp, "expected an object mapping contexts to densities");
        for (auto it = densities.begin(); it != densities.end(); ++it) {
            m.densities.emplace(it.key(), density_from_json(it.value(), join(dp, it.key())));
        }
        if (!m.densities.count(kInitialContext)) fail(dp, "missing \"initial\" entry");
        raw.push_back(std::move(m));
    }

    const json& init = member(j, "initial_state", "");
    if (!init.is_object()) fail("initial_state", "expected an object");
    const bool has_vector = init.contains("vector");
    const bool has_cosines = init.contains("cosines");
    if (has_vector == has_cosines) {
        fail("initial_state", "expected exactly one of \"vector\" or \"cosines\"");
    }

    std::vector<DichotomicMeasurement> measurements;
    UnitVector3 state = UnitVector3::normalized(0.0, 0.0, 1.0);
    if (has_vector) {
        state = vector_from_json(init["vector"], "initial_state.vector");
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (!raw[i].axis) {
                fail(join(at_index("measurements", i), "axis"),
                     "required when initial_state is a vector");
            }
            measurements.push_back({raw[i].id, MeasurementAxis(*raw[i].axis),
                                    ConditionalDensityMap(std::move(raw[i].densities))});
        }
    } else {
        if (raw.size() != 2) fail("measurements", "the cosine form needs exactly two measurements");
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (raw[i].axis) {
                fail(join(at_index("measurements", i), "axis"),
                     "not allowed with the cosine form (axes are implied)");
            }
        }
        const json& cj = init["cosines"];
        const std::string cp = "initial_state.cosines";
        ScenarioGeometry g;
        g.cos_theta_a = number_member(cj, "cos_theta_A", cp);
        g.cos_theta_b = number_member(cj, "cos_theta_B", cp);
        g.cos_theta = number_member(cj, "cos_theta", cp);
        for (const auto& [name, value] :
             {std::pair<const char*, double>{"cos_theta_A", g.cos_theta_a},
              {"cos_theta_B", g.cos_theta_b},
              {"cos_theta", g.cos_theta}}) {
            if (!(value >= -1.0 && value <= 1.0)) fail(join(cp, name), "must lie in [-1, 1]");
        }
        if (!gram_realizable(g.cos_theta_a, g.cos_theta_b, g.cos_theta)) {
            fail(cp, "cosine triple is not realizable on the unit sphere");
        }
        const EmbeddedGeometry emb = embed(g);
        state = emb.state;
        measurements.push_back({raw[0].id, MeasurementAxis(emb.a_yes),
                                ConditionalDensityMap(std::move(raw[0].densities))});
        measurements.push_back({raw[1].id, MeasurementAxis(emb.b_yes),
                                ConditionalDensityMap(std::move(raw[1].densities))});
    }
    return Scenario(state, std::move(measurements), default_to_initial);
}

json scenario_to_json(const Scenario& scenario) {
    json out = json::object();
    json init = json::object();
    init["vector"] = vector_to_json(scenario.initial_state());
    out["initial_state"] = std::move(init);
    json ms = json::array();
    for (const auto& m : scenario.measurements()) {
        json mj = json::object();
        mj["id"] = m.id;
        mj["axis"] = vector_to_json(m.axis.yes_anchor());
        json ds = json::object();
        for (const auto& [key, d] : m.densities.entries()) ds[key] = density_to_json(d);
        mj["densities"] = std::move(ds);
        ms.push_back(std::move(mj));
    }
    out["measurements"] = std::move(ms);
    out["default_to_initial"] = scenario.default_to_initial();
    return out;
}

Scenario load_scenario(const std::string& file_path) {
    std::ifstream in(file_path);
    if (!in) throw ParseError(file_path, "cannot open file");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(file_path, e.what());
    }
    return scenario_from_json(j);
}

ProbabilityTable table_from_json(const json& j, const std::string& path) {
    const json& ids_j = member(j, "step_ids", path);
    const std::string ids_path = join(path, "step_ids");
    if (!ids_j.is_array() || ids_j.empty()) fail(ids_path, "expected a nonempty array");
    if (ids_j.size() > 24) fail(ids_path, "too many steps");
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < ids_j.size(); ++i) {
        if (!ids_j[i].is_string()) fail(at_index(ids_path, i), "expected a string");
        ids.push_back(ids_j[i].get<std::string>());
    }
    const std::size_t n = std::size_t{1} << ids.size();
    const json& entries = member(j, "entries", path);
    const std::string entries_path = join(path, "entries");
    if (!entries.is_array() || entries.size() != n) {
        fail(entries_path, "expected exactly " + std::to_string(n) + " entries");
    }
    std::vector<double> probs(n, 0.0);
    std::vector<bool> seen(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        const std::string ep = at_index(entries_path, i);
        const std::string outcome = string_member(entries[i], "outcome", ep);
        const double p = number_member(entries[i], "probability", ep);
        std::size_t idx = 0;
        try {
            idx = ProbabilityTable::answer_index(answers_from_outcome_string(outcome, ids.size()));
        } catch (const std::invalid_argument& e) {
            fail(join(ep, "outcome"), e.what());
        }
        if (seen[idx]) fail(join(ep, "outcome"), "duplicate outcome \"" + outcome + "\"");
        seen[idx] = true;
        if (!(p >= 0.0 && p <= 1.0)) fail(join(ep, "probability"), "must lie in [0, 1]");
        probs[idx] = p;
    }
    return ProbabilityTable(std::move(ids), std::move(probs));
}

json table_to_json(const ProbabilityTable& table) {
    json out = json::object();
    out["step_ids"] = table.step_ids();
    json entries = json::array();
    for (std::size_t i = 0; i < table.probabilities().size(); ++i) {
        json e = json::object();
        e["outcome"] =
            labeled_outcome_string(table.step_ids(), ProbabilityTable::index_answers(i, table.length()));
        e["probability"] = table.probabilities()[i];
        entries.push_back(std::move(e));
    }
    out["entries"] = std::move(entries);
    return out;
}

json empirical_table_to_json(const EmpiricalTable& table) {
    json out = json::object();
    out["step_ids"] = table.step_ids;
    out["samples"] = table.config.samples;
    out["seed"] = table.config.seed;
    out["chunk_size"] = table.config.chunk_size;
    json entries = json::array();
    for (const auto& e : table.entries) {
        json ej = json::object();
        ej["outcome"] = labeled_outcome_string(
            table.step_ids, answers_from_outcome_string(e.outcome, table.step_ids.size()));
        ej["count"] = e.count;
        ej["probability"] = e.estimate.mean;
        ej["stderr"] = e.estimate.std_error;
        entries.push_back(std::move(ej));
    }
    out["entries"] = std::move(entries);
    return out;
}

std::string table_to_csv(const ProbabilityTable& table) {
    std::ostringstream out;
    out << "outcome,probability\n";
    for (std::size_t i = 0; i < table.probabilities().size(); ++i) {
        out << '"'
            << labeled_outcome_string(table.step_ids(),
                                      ProbabilityTable::index_answers(i, table.length()))
            << "\"," << number_text(table.probabilities()[i]) << '\n';
    }
    return out.str();
}

std::string empirical_table_to_csv(const EmpiricalTable& table) {
    std::ostringstream out;
    out << "outcome,probability,stderr\n";
    for (const auto& e : table.entries) {
        out << '"'
            << labeled_outcome_string(table.step_ids,
                                      answers_from_outcome_string(e.outcome, table.step_ids.size()))
            << "\"," << number_text(e.estimate.mean) << ','
            << number_text(e.estimate.std_error) << '\n';
    }
    return out.str();
}

json estimate_to_json(const Estimate& estimate) {
    json out = json::object();
    out["mean"] = estimate.mean;
    out["stderr"] = estimate.std_error;
    out["n"] = estimate.n;
    return out;
}

json effects_report_to_json(const EffectsReport& report) {
    json out = json::object();
    out["pair"] = json::array({report.a_id, report.b_id});
    out["mode"] = report.empirical ? "empirical" : "analytic";
    out["qq"] = report.qq;
    if (report.empirical) out["qq_stderr"] = report.qq_std_error;
    json deltas = json::object();
    deltas["yes,yes"] = report.deltas.yes_yes;
    deltas["yes,no"] = report.deltas.yes_no;
    deltas["no,yes"] = report.deltas.no_yes;
    deltas["no,no"] = report.deltas.no_no;
    out["deltas"] = std::move(deltas);
    out["order_effect_present"] = report.order_effect_present;
    json adjacent = json::object();
    for (const auto& [id, flag] : report.replicability.adjacent) adjacent[id] = flag;
    out["adjacent"] = std::move(adjacent);
    json separated = json::object();
    for (const auto& [key, p] : report.replicability.separated) separated[key] = p;
    out["separated"] = std::move(separated);
    json tables = json::object();
    if (report.empirical_ab && report.empirical_ba) {
        tables["ab"] = empirical_table_to_json(*report.empirical_ab);
        tables["ba"] = empirical_table_to_json(*report.empirical_ba);
    } else {
        tables["ab"] = table_to_json(report.table_ab);
        tables["ba"] = table_to_json(report.table_ba);
    }
    out["tables"] = std::move(tables);
    return out;
}

json fit_result_to_json(const FitResult& result) {
    json out = json::object();
    json params = json::object();
    for (const auto& [name, value] : result.parameters) params[name] = value;
    out["parameters"] = std::move(params);
    out["loss"] = result.loss;
    out["evaluations"] = result.evaluations;
    out["converged"] = result.converged;
    return out;
}

namespace {

std::map<std::string, BreakDensity> densities_from_json(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object mapping contexts to densities");
    std::map<std::string, BreakDensity> out;
    for (auto it = j.begin(); it != j.end(); ++it) {
        out.emplace(it.key(), density_from_json(it.value(), join(path, it.key())));
    }
    return out;
}

FitSpec fit_spec_from_json(const json& j, const std::string& path) {
    FitSpec spec;
    const json& g = member(j, "geometry", path);
    const std::string gp = join(path, "geometry");
    spec.geometry.cos_theta_a = number_member(g, "cos_theta_a", gp);
    spec.geometry.cos_theta_b = number_member(g, "cos_theta_b", gp);
    spec.geometry.cos_theta = number_member(g, "cos_theta", gp);
    spec.a_id = string_member(j, "a_id", path);
    spec.b_id = string_member(j, "b_id", path);
    spec.a_densities = densities_from_json(member(j, "a_densities", path), join(path, "a_densities"));
    spec.b_densities = densities_from_json(member(j, "b_densities", path), join(path, "b_densities"));
    if (j.contains("default_to_initial")) {
        const json& v = j["default_to_initial"];
        if (!v.is_boolean()) fail(join(path, "default_to_initial"), "expected a boolean");
        spec.default_to_initial = v.get<bool>();
    }
    if (!j.contains("free_parameters")) return spec;
    const json& fps = j["free_parameters"];
    const std::string fpath = join(path, "free_parameters");
    if (!fps.is_array()) fail(fpath, "expected an array");
    for (std::size_t i = 0; i < fps.size(); ++i) {
        const std::string pp = at_index(fpath, i);
        const json& pj = fps[i];
        if (!pj.is_object()) fail(pp, "expected an object");
        FreeParameter p;
        p.name = string_member(pj, "name", pp);
        p.lower = number_member(pj, "lower", pp);
        p.upper = number_member(pj, "upper", pp);
        const json& bj = member(pj, "binding", pp);
        const std::string bp = join(pp, "binding");
        const std::string target = string_member(bj, "target", bp);
        try {
            p.binding.target = parameter_target_from_string(target);
        } catch (const std::invalid_argument& e) {
            fail(join(bp, "target"), e.what());
        }
        if (bj.contains("measurement")) p.binding.measurement_id = string_member(bj, "measurement", bp);
        if (bj.contains("context")) p.binding.context_key = string_member(bj, "context", bp);
        if (bj.contains("weight_index")) {
            p.binding.weight_index = static_cast<std::size_t>(unsigned_member(bj, "weight_index", bp));
        }
        spec.free_parameters.push_back(std::move(p));
    }
    return spec;
}

}  // namespace

FitProblem fit_problem_from_json(const json& j) {
    if (!j.is_object()) fail("", "expected a fit problem object");
    FitProblem problem;
    problem.spec = fit_spec_from_json(member(j, "spec", ""), "spec");
    try {
        validate_fit_spec(problem.spec);
    } catch (const std::invalid_argument& e) {
        fail("spec", e.what());
    }
    problem.target_ab = table_from_json(member(j, "target_ab", ""), "target_ab");
    problem.target_ba = table_from_json(member(j, "target_ba", ""), "target_ba");
    try {
        validate_fit_targets(problem.spec, problem.target_ab, problem.target_ba);
    } catch (const std::invalid_argument& e) {
        fail("target_ab", e.what());
    }
    if (j.contains("restarts")) problem.restarts = unsigned_member(j, "restarts", "");
    if (j.contains("seed")) problem.seed = unsigned_member(j, "seed", "");
    return problem;
}

FitProblem load_fit_problem(const std::string& file_path) {
    std::ifstream in(file_path);
    if (!in) throw ParseError(file_path, "cannot open file");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(file_path, e.what());
    }
    return fit_problem_from_json(j);
}

}  // namespace gtr::io
