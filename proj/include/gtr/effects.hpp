#pragma once

#include <map>
#include <optional>
#include <string>

#include "gtr/montecarlo.hpp"
#include "gtr/sequential.hpp"

namespace gtr {

/// Per-cell order differences p(A_i B_j) - p(B_j A_i).
struct OrderDeltas {
    double yes_yes = 0.0;
    double yes_no = 0.0;
    double no_yes = 0.0;
    double no_no = 0.0;
};

/// Left side of the QQ equality: p(A_yB_y) - p(B_yA_y) + p(A_nB_n) - p(B_nA_n).
/// Zero for every uniform-density (Born) model; a nonzero value certifies a
/// non-Hilbertian scenario. Tables must cover the same pair in opposite orders.
double qq_value(const ProbabilityTable& table_ab, const ProbabilityTable& table_ba);

OrderDeltas order_effect_deltas(const ProbabilityTable& table_ab, const ProbabilityTable& table_ba);

struct ReplicabilityReport {
    /// id -> true iff the "X,X" off-diagonals vanish.
    std::map<std::string, bool> adjacent;
    /// "A:yes,B:yes,A:yes" -> p(A_y B_y A_y), all eight ABA/BAB patterns.
    std::map<std::string, double> separated;
};

ReplicabilityReport replicability_report(const Scenario& scenario, const std::string& a_id,
                                         const std::string& b_id);

struct EffectsReport {
    std::string a_id;
    std::string b_id;
    bool empirical = false;
    double qq = 0.0;
    double qq_std_error = 0.0;  // zero in analytic mode
    OrderDeltas deltas;
    bool order_effect_present = false;
    ReplicabilityReport replicability;
    ProbabilityTable table_ab;
    ProbabilityTable table_ba;
    std::optional<EmpiricalTable> empirical_ab;
    std::optional<EmpiricalTable> empirical_ba;
};

EffectsReport analytic_effects(const Scenario& scenario, const std::string& a_id,
                               const std::string& b_id);

/// Empirical counterpart; each of the six underlying simulations (AB, BA, AA,
/// BB, ABA, BAB) runs on its own master seed derived from config.seed, and an
/// order effect is declared only beyond 4x the propagated stderr.
EffectsReport empirical_effects(const Scenario& scenario, const std::string& a_id,
                                const std::string& b_id, const RunConfig& config);

}  // namespace gtr
