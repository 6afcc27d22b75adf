#include "gtr/effects.hpp"

#include <cmath>
#include <stdexcept>

namespace gtr {

namespace {

constexpr double kAdjacentTol = 1e-12;
constexpr double kAnalyticOrderTol = 1e-9;

void check_opposite_orders(const ProbabilityTable& ab, const ProbabilityTable& ba) {
    if (ab.length() != 2 || ba.length() != 2) {
        throw std::invalid_argument("order-effect tables must cover two-step sequences");
    }
    const auto& f = ab.step_ids();
    const auto& r = ba.step_ids();
    if (f[0] == f[1]) {
        throw std::invalid_argument("order-effect tables need two distinct measurements");
    }
    if (f[0] != r[1] || f[1] != r[0]) {
        throw std::invalid_argument("tables must cover the same measurement pair in opposite orders");
    }
}

double cell(const ProbabilityTable& t, Answer first, Answer second) {
    return t.probability(std::vector<Answer>{first, second});
}

std::string separated_key(const std::string& a, Answer i, const std::string& b, Answer j) {
    return OutcomeLabel{a, i}.key() + "," + OutcomeLabel{b, j}.key() + "," +
           OutcomeLabel{a, i}.key();
}

bool off_diagonals_vanish(const ProbabilityTable& xx, double tol) {
    return cell(xx, Answer::yes, Answer::no) < tol && cell(xx, Answer::no, Answer::yes) < tol;
}

}  // namespace

double qq_value(const ProbabilityTable& table_ab, const ProbabilityTable& table_ba) {
    const OrderDeltas d = order_effect_deltas(table_ab, table_ba);
    return d.yes_yes + d.no_no;
}

OrderDeltas order_effect_deltas(const ProbabilityTable& table_ab,
                                const ProbabilityTable& table_ba) {
    check_opposite_orders(table_ab, table_ba);
    OrderDeltas d;
    // p(A_i B_j) - p(B_j A_i): the BA table is read transposed.
    d.yes_yes = cell(table_ab, Answer::yes, Answer::yes) - cell(table_ba, Answer::yes, Answer::yes);
    d.yes_no = cell(table_ab, Answer::yes, Answer::no) - cell(table_ba, Answer::no, Answer::yes);
    d.no_yes = cell(table_ab, Answer::no, Answer::yes) - cell(table_ba, Answer::yes, Answer::no);
    d.no_no = cell(table_ab, Answer::no, Answer::no) - cell(table_ba, Answer::no, Answer::no);
    return d;
}

ReplicabilityReport replicability_report(const Scenario& scenario, const std::string& a_id,
                                         const std::string& b_id) {
    ReplicabilityReport report;
    for (const auto& id : {a_id, b_id}) {
        const auto xx = sequence_distribution(scenario, SequenceSpec{{id, id}});
        report.adjacent[id] = off_diagonals_vanish(xx, kAdjacentTol);
    }
    const auto aba = sequence_distribution(scenario, SequenceSpec{{a_id, b_id, a_id}});
    const auto bab = sequence_distribution(scenario, SequenceSpec{{b_id, a_id, b_id}});
    for (Answer i : {Answer::yes, Answer::no}) {
        for (Answer j : {Answer::yes, Answer::no}) {
            report.separated[separated_key(a_id, i, b_id, j)] =
                aba.probability(std::vector<Answer>{i, j, i});
            report.separated[separated_key(b_id, i, a_id, j)] =
                bab.probability(std::vector<Answer>{i, j, i});
        }
    }
    return report;
}

EffectsReport analytic_effects(const Scenario& scenario, const std::string& a_id,
                               const std::string& b_id) {
    EffectsReport report;
    report.a_id = a_id;
    report.b_id = b_id;
    report.table_ab = sequence_distribution(scenario, SequenceSpec{{a_id, b_id}});
    report.table_ba = sequence_distribution(scenario, SequenceSpec{{b_id, a_id}});
    report.qq = qq_value(report.table_ab, report.table_ba);
    report.deltas = order_effect_deltas(report.table_ab, report.table_ba);
    report.order_effect_present = std::abs(report.deltas.yes_yes) > kAnalyticOrderTol ||
                                  std::abs(report.deltas.yes_no) > kAnalyticOrderTol ||
                                  std::abs(report.deltas.no_yes) > kAnalyticOrderTol ||
                                  std::abs(report.deltas.no_no) > kAnalyticOrderTol;
    report.replicability = replicability_report(scenario, a_id, b_id);
    return report;
}

EffectsReport empirical_effects(const Scenario& scenario, const std::string& a_id,
                                const std::string& b_id, const RunConfig& config) {
    auto run = [&](const SequenceSpec& seq, std::uint64_t slot) {
        RunConfig sub = config;
        sub.seed = mix_seed(config.seed, slot);
        return simulate_sequence(scenario, seq, sub);
    };
    const auto ab = run(SequenceSpec{{a_id, b_id}}, 0);
    const auto ba = run(SequenceSpec{{b_id, a_id}}, 1);
    const auto aa = run(SequenceSpec{{a_id, a_id}}, 2);
    const auto bb = run(SequenceSpec{{b_id, b_id}}, 3);
    const auto aba = run(SequenceSpec{{a_id, b_id, a_id}}, 4);
    const auto bab = run(SequenceSpec{{b_id, a_id, b_id}}, 5);

    EffectsReport report;
    report.a_id = a_id;
    report.b_id = b_id;
    report.empirical = true;
    report.table_ab = ab.to_probability_table();
    report.table_ba = ba.to_probability_table();
    report.qq = qq_value(report.table_ab, report.table_ba);
    report.deltas = order_effect_deltas(report.table_ab, report.table_ba);

    auto se = [](const EmpiricalTable& t, Answer first, Answer second) {
        return t.entry(outcome_string({first, second})).estimate.std_error;
    };
    report.qq_std_error = std::sqrt(
        std::pow(se(ab, Answer::yes, Answer::yes), 2) + std::pow(se(ba, Answer::yes, Answer::yes), 2) +
        std::pow(se(ab, Answer::no, Answer::no), 2) + std::pow(se(ba, Answer::no, Answer::no), 2));

    auto beyond_noise = [&](double delta, Answer i, Answer j) {
        const double noise = std::hypot(se(ab, i, j), se(ba, j, i));
        return std::abs(delta) > 4.0 * noise;
    };
    report.order_effect_present = beyond_noise(report.deltas.yes_yes, Answer::yes, Answer::yes) ||
                                  beyond_noise(report.deltas.yes_no, Answer::yes, Answer::no) ||
                                  beyond_noise(report.deltas.no_yes, Answer::no, Answer::yes) ||
                                  beyond_noise(report.deltas.no_no, Answer::no, Answer::no);

    report.replicability.adjacent[a_id] = aa.entry("yes,no").count == 0 && aa.entry("no,yes").count == 0;
    report.replicability.adjacent[b_id] = bb.entry("yes,no").count == 0 && bb.entry("no,yes").count == 0;
    for (Answer i : {Answer::yes, Answer::no}) {
        for (Answer j : {Answer::yes, Answer::no}) {
            report.replicability.separated[separated_key(a_id, i, b_id, j)] =
                aba.entry(outcome_string({i, j, i})).estimate.mean;
            report.replicability.separated[separated_key(b_id, i, a_id, j)] =
                bab.entry(outcome_string({i, j, i})).estimate.mean;
        }
    }
    report.empirical_ab = ab;
    report.empirical_ba = ba;
    return report;
}

}  // namespace gtr
