// Acceptance harness: one criterion per documented model guarantee, each
// timed against its budget and reported as a single [PASS]/[FAIL] line. The
// process exits nonzero when any criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "generators.hpp"
#include "gtr/density.hpp"
#include "gtr/effects.hpp"
#include "gtr/ensemble.hpp"
#include "gtr/fitting.hpp"
#include "gtr/geometry.hpp"
#include "gtr/measurement.hpp"
#include "gtr/montecarlo.hpp"
#include "gtr/rng.hpp"
#include "gtr/scenario_io.hpp"
#include "gtr/sequential.hpp"

namespace {

using namespace gtr;

class Check {
public:
    void that(bool ok, const std::string& what) {
        if (!ok) failures_.push_back(what);
    }
    bool passed() const { return failures_.empty(); }
    const std::vector<std::string>& failures() const { return failures_; }

private:
    std::vector<std::string> failures_;
};

std::string format_seconds(double s) {
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(2);
    out << s << " s";
    return out.str();
}

// ---------------------------------------------------------------------------
// 1. Uniform densities reproduce the Born probabilities exactly.

void born_recovery(Check& check) {
    Rng rng(2026001);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const ScenarioGeometry g = testgen::random_realizable_geometry(rng);
        const Scenario s = testgen::uniform_scenario(g);
        const double cosines[2] = {g.cos_theta_a, g.cos_theta_b};
        const char* ids[2] = {"A", "B"};
        for (int m = 0; m < 2; ++m) {
            const OutcomePair p =
                outcome_probabilities(s.initial_state(), s.measurement(ids[m]), kInitialContext);
            const OutcomePair born = born_probabilities(cosines[m]);
            worst = std::max(worst, std::abs(p.p_yes - born.p_yes));
            worst = std::max(worst, std::abs(p.p_no - born.p_no));
        }
        const UnitVector3 state = testgen::random_unit_vector(rng);
        const MeasurementAxis axis(testgen::random_unit_vector(rng));
        const OutcomePair p = outcome_probabilities(state, axis, BreakDensity::uniform());
        const OutcomePair born = born_probabilities(dot(state, axis.yes_anchor()));
        worst = std::max(worst, std::abs(p.p_yes - born.p_yes));
        worst = std::max(worst, std::abs(p.p_no - born.p_no));
    }
    check.that(worst <= 1e-12,
               "largest deviation from the Born pair is " + std::to_string(worst));
}

// ---------------------------------------------------------------------------
// 2. Analytic question-order value vanishes for every uniform model.

void qq_equality_under_uniformity(Check& check) {
    Rng rng(2026002);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const Scenario s = testgen::uniform_scenario(testgen::random_realizable_geometry(rng));
        // The individual deltas are generally nonzero here; only their qq
        // combination is constrained.
        worst = std::max(worst, std::abs(analytic_effects(s, "A", "B").qq));
    }
    check.that(worst <= 1e-12, "largest |qq| over uniform scenarios is " + std::to_string(worst));
}

// ---------------------------------------------------------------------------
// 3. The skewed-conditional fixture shows qq = 0.05, analytically and
//    by simulation.

void qq_violation_witness(Check& check) {
    const Scenario s = testgen::q_scenario();
    const EffectsReport analytic = analytic_effects(s, "A", "B");
    check.that(std::abs(analytic.qq - 0.05) <= 1e-12,
               "analytic qq is " + std::to_string(analytic.qq));
    check.that(analytic.order_effect_present, "analytic report missed the order effect");

    const EffectsReport empirical =
        empirical_effects(s, "A", "B", RunConfig{1'000'000, 20260814, 65536});
    check.that(empirical.qq_std_error > 0.0, "propagated stderr is not positive");
    check.that(std::abs(empirical.qq - 0.05) <= 4.0 * empirical.qq_std_error,
               "empirical qq " + std::to_string(empirical.qq) + " is more than 4 stderr (" +
                   std::to_string(empirical.qq_std_error) + ") from 0.05");
}

// ---------------------------------------------------------------------------
// 4. Asking the same question twice replicates the first answer, in the
//    analytic tables and in every simulated sample.

void adjacent_replicability(Check& check) {
    Rng rng(2026004);
    int analytic_bad = 0;
    std::uint64_t stray = 0;
    for (int i = 0; i < 100; ++i) {
        const Scenario s = testgen::random_scenario(rng);
        for (const char* id : {"A", "B"}) {
            const SequenceSpec repeat{{id, id}};
            const ProbabilityTable t = sequence_distribution(s, repeat);
            if (t.probabilities()[1] != 0.0 || t.probabilities()[2] != 0.0) ++analytic_bad;
            const EmpiricalTable e =
                simulate_sequence(s, repeat, RunConfig{10'000, mix_seed(2026004, i), 4096});
            stray += e.entry("yes,no").count + e.entry("no,yes").count;
        }
    }
    check.that(analytic_bad == 0,
               std::to_string(analytic_bad) + " analytic tables have nonzero off-diagonals");
    check.that(stray == 0, std::to_string(stray) + " simulated samples flipped on the repeat");
}

// ---------------------------------------------------------------------------
// 5. Densities concentrated beyond the landing coordinates replicate an
//    earlier answer across an interposed question; uniform densities cannot.

void separated_replicability(Check& check) {
    const ScenarioGeometry g{0.6, 0.3, 0.5};
    const EmbeddedGeometry e = embed(g);
    std::map<std::string, BreakDensity> a_entries;
    a_entries.emplace(kInitialContext, BreakDensity::uniform());
    a_entries.emplace("B:yes", BreakDensity::locally_uniform(-0.2, 0.1));
    a_entries.emplace("B:no", BreakDensity::locally_uniform(0.2, 0.1));
    std::vector<DichotomicMeasurement> ms;
    ms.push_back({"A", MeasurementAxis(e.a_yes), ConditionalDensityMap(std::move(a_entries))});
    ms.push_back({"B", MeasurementAxis(e.b_yes), testgen::uniform_density_map("A")});
    const Scenario replicating(e.state, std::move(ms));

    const SequenceSpec aba{{"A", "B", "A"}};
    const SequenceSpec ab{{"A", "B"}};
    const ProbabilityTable t3 = sequence_distribution(replicating, aba);
    const ProbabilityTable t2 = sequence_distribution(replicating, ab);
    const double p_yy = t2.probability("yes,yes");
    const double p_yyy = t3.probability("yes,yes,yes");
    check.that(std::abs(p_yyy - p_yy) <= 1e-12,
               "p(yes,yes,yes) " + std::to_string(p_yyy) + " != p(yes,yes) " +
                   std::to_string(p_yy));
    check.that(std::abs(p_yyy / p_yy - 1.0) <= 1e-12,
               "third-step conditional " + std::to_string(p_yyy / p_yy) + " is not 1");
    check.that(std::abs(p_yyy - 0.8 * 0.75) <= 1e-12,
               "p(yes,yes,yes) " + std::to_string(p_yyy) + " != 0.6");

    const Scenario uniform = testgen::uniform_scenario(g);
    const double u_yy = sequence_distribution(uniform, ab).probability("yes,yes");
    const double u_yyy = sequence_distribution(uniform, aba).probability("yes,yes,yes");
    const double conditional = u_yyy / u_yy;
    check.that(std::abs(conditional - 0.75) <= 1e-12,
               "uniform third-step conditional " + std::to_string(conditional) + " is not 0.75");
    check.that(conditional < 1.0 - 1e-9, "uniform model unexpectedly replicates");
}

// ---------------------------------------------------------------------------
// 6. Simulated two-step tables agree with the analytic ones to 4 stderr.
//    One reseeded re-run per scenario absorbs ordinary 4-sigma flakes.

void monte_carlo_agreement(Check& check) {
    Rng rng(2026006);
    const SequenceSpec ab{{"A", "B"}};
    const std::uint64_t samples = 100'000;
    int disagreements = 0;

    const auto consistent = [&](const Scenario& s, const ProbabilityTable& analytic,
                                std::uint64_t seed) {
        const EmpiricalTable e = simulate_sequence(s, ab, RunConfig{samples, seed, 65536});
        for (std::size_t k = 0; k < analytic.probabilities().size(); ++k) {
            const double p = analytic.probabilities()[k];
            const double reference =
                std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
            const double se = std::max(e.entries[k].estimate.std_error, reference);
            if (std::abs(e.entries[k].estimate.mean - p) > 4.0 * se) return false;
        }
        return true;
    };

    for (int i = 0; i < 50; ++i) {
        const Scenario s = testgen::random_scenario(rng);
        const ProbabilityTable analytic = sequence_distribution(s, ab);
        if (consistent(s, analytic, mix_seed(2026006, static_cast<std::uint64_t>(i)))) continue;
        if (consistent(s, analytic, mix_seed(2026006, static_cast<std::uint64_t>(i) + 1000)))
            continue;
        ++disagreements;
    }
    check.that(disagreements == 0,
               std::to_string(disagreements) + " scenarios disagree beyond 4 stderr twice");
}

// ---------------------------------------------------------------------------
// 7. Averaging the yes-probability over random densities recovers Born.

void universal_average(Check& check) {
    for (const double cos_theta : {-0.8, 0.0, 0.6}) {
        const Estimate est =
            universal_average_probability(cos_theta, EnsembleConfig{10'000, 20, 2026007});
        const double born = born_probabilities(cos_theta).p_yes;
        check.that(std::abs(est.mean - born) <= 0.02,
                   "mean " + std::to_string(est.mean) + " at cos " + std::to_string(cos_theta) +
                       " is more than 0.02 from " + std::to_string(born));
    }
}

// ---------------------------------------------------------------------------
// 8. Fits on self-generated problems recover the generating parameters.

void fit_round_trip(Check& check) {
    Rng rng(2026008);
    const auto in_range = [&](double lo, double hi) {
        return lo + (hi - lo) * rng.next_uniform();
    };
    const auto gram_margin = [](const ScenarioGeometry& g) {
        return 1.0 + 2.0 * g.cos_theta_a * g.cos_theta_b * g.cos_theta -
               g.cos_theta_a * g.cos_theta_a - g.cos_theta_b * g.cos_theta_b -
               g.cos_theta * g.cos_theta;
    };
    const auto solid_geometry = [&](double c_lo, double c_hi) {
        while (true) {
            const ScenarioGeometry g{in_range(-0.8, 0.8), in_range(-0.8, 0.8),
                                     in_range(c_lo, c_hi)};
            if (gram_margin(g) >= 0.05) return g;
        }
    };

    int solved = 0;
    int recovered = 0;
    for (int i = 0; i < 20; ++i) {
        FitSpec spec;
        spec.a_densities = testgen::uniform_density_map("B").entries();
        spec.b_densities = testgen::uniform_density_map("A").entries();
        std::map<std::string, double> truth;

        switch (i % 4) {
            case 0: {
                const ScenarioGeometry g = solid_geometry(-0.7, 0.7);
                spec.free_parameters = {
                    {"ca", -0.95, 0.95, {ParameterTarget::cos_theta_a, "", "", 0}},
                    {"cb", -0.95, 0.95, {ParameterTarget::cos_theta_b, "", "", 0}},
                    {"c", -0.95, 0.95, {ParameterTarget::cos_theta, "", "", 0}}};
                truth = {{"ca", g.cos_theta_a}, {"cb", g.cos_theta_b}, {"c", g.cos_theta}};
                break;
            }
            case 1: {
                spec.geometry = solid_geometry(-0.7, 0.7);
                spec.b_densities.insert_or_assign(
                    "A:yes", BreakDensity::piecewise({-1.0, 0.0, 1.0}, {0.5, 0.5}));
                spec.free_parameters = {
                    {"w", 0.01, 0.99, {ParameterTarget::density_weight, "B", "A:yes", 0}}};
                truth = {{"w", in_range(0.1, 0.9)}};
                break;
            }
            case 2: {
                const ScenarioGeometry g = solid_geometry(-0.7, 0.7);
                spec.geometry = {g.cos_theta_a, g.cos_theta_b, 0.0};
                spec.b_densities.insert_or_assign(
                    "A:yes", BreakDensity::piecewise({-1.0, 0.0, 1.0}, {0.5, 0.5}));
                spec.free_parameters = {
                    {"c", -0.95, 0.95, {ParameterTarget::cos_theta, "", "", 0}},
                    {"w", 0.01, 0.99, {ParameterTarget::density_weight, "B", "A:yes", 0}}};
                truth = {{"c", g.cos_theta}, {"w", in_range(0.1, 0.9)}};
                break;
            }
            default: {
                ScenarioGeometry g = solid_geometry(0.5, 0.5);
                spec.geometry = {0.0, g.cos_theta_b, 0.5};
                spec.a_densities.insert_or_assign("B:yes",
                                                  BreakDensity::locally_uniform(0.5, 0.25));
                spec.free_parameters = {
                    {"ca", -0.95, 0.95, {ParameterTarget::cos_theta_a, "", "", 0}},
                    {"center", 0.26, 0.74,
                     {ParameterTarget::density_center, "A", "B:yes", 0}}};
                truth = {{"ca", g.cos_theta_a}, {"center", in_range(0.35, 0.65)}};
                break;
            }
        }

        const Scenario generated = instantiate_scenario(spec, truth);
        const ProbabilityTable ab = sequence_distribution(generated, SequenceSpec{{"A", "B"}});
        const ProbabilityTable ba = sequence_distribution(generated, SequenceSpec{{"B", "A"}});
        const FitResult result =
            fit(spec, ab, ba, 16, mix_seed(2026008, static_cast<std::uint64_t>(i)));

        if (result.loss < 1e-8) ++solved;
        bool close = true;
        for (const auto& [name, value] : truth) {
            if (std::abs(result.parameters.at(name) - value) > 1e-2) close = false;
        }
        if (close) ++recovered;
    }
    check.that(solved == 20, std::to_string(20 - solved) + " of 20 fits ended above 1e-8 loss");
    check.that(recovered == 20,
               std::to_string(20 - recovered) + " of 20 fits missed the truth by more than 1e-2");
}

// ---------------------------------------------------------------------------
// 9. The simulate and fit commands are byte-identical across reruns and
//    worker budgets.

struct CommandResult {
    int exit_code = -1;
    std::string output;
};

CommandResult run_cli(const std::string& args, const std::string& env = "") {
    const std::string command = env + GTR_CLI_PATH + (" " + args) + " 2>&1";
    FILE* pipe = popen(command.c_str(), "r");
    CommandResult result;
    if (pipe == nullptr) return result;
    char buffer[4096];
    std::size_t got = 0;
    while ((got = std::fread(buffer, 1, sizeof(buffer), pipe)) > 0) {
        result.output.append(buffer, got);
    }
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

const char* kFitProblemJson = R"({
  "spec": {
    "geometry": {"cos_theta_a": 0.0, "cos_theta_b": 0.0, "cos_theta": 0.5},
    "a_id": "A",
    "b_id": "B",
    "a_densities": {
      "B:no": {"type": "uniform"},
      "B:yes": {"type": "uniform"},
      "initial": {"type": "uniform"}
    },
    "b_densities": {
      "A:no": {"type": "uniform"},
      "A:yes": {"type": "piecewise", "breakpoints": [-1.0, 0.0, 1.0], "weights": [0.5, 0.5]},
      "initial": {"type": "uniform"}
    },
    "free_parameters": [
      {
        "name": "w_yes",
        "lower": 0.01,
        "upper": 0.99,
        "binding": {"target": "density_weight", "measurement": "B", "context": "A:yes",
                    "weight_index": 0}
      }
    ]
  },
  "target_ab": {"step_ids": ["A", "B"], "entries": [
    {"outcome": "A:yes,B:yes", "probability": 0.425},
    {"outcome": "A:yes,B:no", "probability": 0.075},
    {"outcome": "A:no,B:yes", "probability": 0.125},
    {"outcome": "A:no,B:no", "probability": 0.375}]},
  "target_ba": {"step_ids": ["B", "A"], "entries": [
    {"outcome": "B:yes,A:yes", "probability": 0.375},
    {"outcome": "B:yes,A:no", "probability": 0.125},
    {"outcome": "B:no,A:yes", "probability": 0.125},
    {"outcome": "B:no,A:no", "probability": 0.375}]}
})";

void cli_determinism(Check& check) {
    const auto dir = std::filesystem::temp_directory_path();
    const std::string scenario_path = (dir / "gtr_acceptance_scenario.json").string();
    const std::string problem_path = (dir / "gtr_acceptance_problem.json").string();
    {
        std::ofstream out(scenario_path);
        out << io::scenario_to_json(testgen::q_scenario()).dump(2) << "\n";
    }
    {
        std::ofstream out(problem_path);
        out << kFitProblemJson;
    }

    const auto identical = [&](const std::string& label, const std::string& args) {
        const CommandResult base = run_cli(args);
        check.that(base.exit_code == 0, label + " exited with " +
                                            std::to_string(base.exit_code) + ": " + base.output);
        check.that(run_cli(args).output == base.output, label + " differs between two runs");
        check.that(run_cli(args, "GTR_THREADS=1 ").output == base.output,
                   label + " differs under a single-worker budget");
        check.that(run_cli(args, "GTR_THREADS=2 ").output == base.output,
                   label + " differs under a two-worker budget");
    };
    identical("simulate",
              "simulate --scenario " + scenario_path + " --sequence A,B --samples 100000 --seed 7");
    identical("fit", "fit --problem " + problem_path + " --restarts 6 --seed 11");
}

struct Criterion {
    std::string label;
    double limit_seconds;
    std::function<void(Check&)> body;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"Born probabilities from uniform densities (1000 geometries)", 1.0, born_recovery},
        {"qq equality on 100 uniform scenarios", 1.0, qq_equality_under_uniformity},
        {"qq = 0.05 witness, analytic and at 1e6 samples", 30.0, qq_violation_witness},
        {"adjacent replicability on 100 random scenarios", 5.0, adjacent_replicability},
        {"separated replicability vs the uniform contrast", 1.0, separated_replicability},
        {"simulation within 4 stderr on 50 scenarios", 60.0, monte_carlo_agreement},
        {"universal density average recovers Born", 10.0, universal_average},
        {"parameter recovery on 20 generated fit problems", 60.0, fit_round_trip},
        {"byte-identical simulate and fit across reruns and workers", 0.0, cli_determinism},
    };

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const Criterion& c = criteria[i];
        Check check;
        const auto start = std::chrono::steady_clock::now();
        c.body(check);
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.limit_seconds > 0.0 && elapsed > c.limit_seconds) {
            check.that(false, "runtime " + format_seconds(elapsed) + " exceeds the " +
                                  format_seconds(c.limit_seconds) + " budget");
        }

        std::cout << (check.passed() ? "[PASS] " : "[FAIL] ") << (i + 1) << ". " << c.label
                  << "  (" << format_seconds(elapsed);
        if (c.limit_seconds > 0.0) std::cout << ", budget " << format_seconds(c.limit_seconds);
        std::cout << ")\n";
        for (const std::string& what : check.failures()) {
            std::cout << "       " << what << "\n";
        }
        if (!check.passed()) ++failed;
    }

    std::cout << "acceptance: " << (criteria.size() - static_cast<std::size_t>(failed)) << " of "
              << criteria.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
