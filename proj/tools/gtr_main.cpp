#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gtr/effects.hpp"
#include "gtr/ensemble.hpp"
#include "gtr/fitting.hpp"
#include "gtr/montecarlo.hpp"
#include "gtr/scenario_io.hpp"
#include "gtr/sequential.hpp"

namespace {

using gtr::io::json;

std::pair<std::string, std::string> parse_pair(const std::string& text) {
    const auto seq = gtr::SequenceSpec::parse(text);
    if (seq.length() != 2 || seq.step_ids[0] == seq.step_ids[1]) {
        throw std::invalid_argument("--pair expects two distinct measurement ids, e.g. \"A,B\"");
    }
    return {seq.step_ids[0], seq.step_ids[1]};
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GTR-model toolkit: sequential dichotomic measurements on the Bloch sphere"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string sequence_text;
    std::string pair_text;
    std::string problem_path;
    std::string format = "json";
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    std::uint64_t chunk_size = 65536;
    std::uint64_t trials = 0;
    std::uint64_t max_cells = 10;
    std::uint64_t restarts = 16;
    double cos_theta = 0.0;

    auto* validate = app.add_subcommand("validate", "Parse a scenario file, print its normalized form");
    validate->add_option("--scenario", scenario_path, "scenario JSON file")->required();

    auto* compute = app.add_subcommand("compute", "Analytic outcome table for a sequence");
    compute->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    compute->add_option("--sequence", sequence_text, "comma-separated measurement ids")->required();
    compute->add_option("--format", format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo outcome table for a sequence");
    simulate->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    simulate->add_option("--sequence", sequence_text, "comma-separated measurement ids")->required();
    simulate->add_option("--samples", samples, "sample count")->required();
    simulate->add_option("--seed", seed, "master seed");
    simulate->add_option("--chunk-size", chunk_size, "samples per parallel chunk");
    simulate->add_option("--format", format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));

    auto* effects = app.add_subcommand("effects", "Order-effect and replicability report for a pair");
    effects->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    effects->add_option("--pair", pair_text, "two measurement ids, e.g. A,B")->required();
    effects->add_option("--samples", samples, "empirical mode sample count (analytic when absent)");
    effects->add_option("--seed", seed, "master seed (empirical mode)");
    effects->add_option("--chunk-size", chunk_size, "samples per parallel chunk");

    auto* born = app.add_subcommand("born-average", "Average outcome probability over random densities");
    born->add_option("--cos-theta", cos_theta, "landing coordinate")->required();
    born->add_option("--trials", trials, "number of random densities")->required();
    born->add_option("--max-cells", max_cells, "piecewise cell count upper bound");
    born->add_option("--seed", seed, "master seed");

    auto* fit_cmd = app.add_subcommand("fit", "Fit free parameters against target tables");
    fit_cmd->add_option("--problem", problem_path, "fit problem JSON file")->required();
    fit_cmd->add_option("--restarts", restarts, "search restarts (overrides the file)");
    fit_cmd->add_option("--seed", seed, "search seed (overrides the file)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*validate) {
            emit(gtr::io::scenario_to_json(gtr::io::load_scenario(scenario_path)));
        } else if (*compute) {
            const auto scenario = gtr::io::load_scenario(scenario_path);
            const auto table =
                gtr::sequence_distribution(scenario, gtr::SequenceSpec::parse(sequence_text));
            if (format == "csv") {
                std::cout << gtr::io::table_to_csv(table);
            } else {
                emit(gtr::io::table_to_json(table));
            }
        } else if (*simulate) {
            const auto scenario = gtr::io::load_scenario(scenario_path);
            const auto table = gtr::simulate_sequence(
                scenario, gtr::SequenceSpec::parse(sequence_text), {samples, seed, chunk_size});
            if (format == "csv") {
                std::cout << gtr::io::empirical_table_to_csv(table);
            } else {
                emit(gtr::io::empirical_table_to_json(table));
            }
        } else if (*effects) {
            const auto scenario = gtr::io::load_scenario(scenario_path);
            const auto [a_id, b_id] = parse_pair(pair_text);
            const auto report = effects->count("--samples")
                                    ? gtr::empirical_effects(scenario, a_id, b_id,
                                                             {samples, seed, chunk_size})
                                    : gtr::analytic_effects(scenario, a_id, b_id);
            emit(gtr::io::effects_report_to_json(report));
        } else if (*born) {
            const auto estimate =
                gtr::universal_average_probability(cos_theta, {trials, max_cells, seed});
            json out = json::object();
            out["cos_theta"] = cos_theta;
            out["born_value"] = gtr::born_probabilities(cos_theta).p_yes;
            out["mean"] = estimate.mean;
            out["stderr"] = estimate.std_error;
            out["n"] = estimate.n;
            emit(out);
        } else if (*fit_cmd) {
            const auto problem = gtr::io::load_fit_problem(problem_path);
            std::uint64_t run_restarts = problem.restarts.value_or(16);
            std::uint64_t run_seed = problem.seed.value_or(0);
            if (fit_cmd->count("--restarts")) run_restarts = restarts;
            if (fit_cmd->count("--seed")) run_seed = seed;
            const auto result =
                gtr::fit(problem.spec, problem.target_ab, problem.target_ba, run_restarts, run_seed);
            emit(gtr::io::fit_result_to_json(result));
        }
        return 0;
    } catch (const gtr::io::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const gtr::MissingContextError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
