#pragma once

#include <string>
#include <vector>

#include "debatekit/backend.hpp"
#include "debatekit/debate.hpp"
#include "debatekit/memory.hpp"

namespace debatekit {

struct Dataset {
    std::string name;
    std::vector<Query> items;
    AnswerMode answer_mode = AnswerMode::final_number;
};

/// JSON Lines loader: one {id, question, answer} object per line. Gold answers
/// are canonicalized; a trailing "#### x" rationale suffix (GSM8K convention)
/// reduces to x. Malformed lines report their line number.
Dataset load_dataset(const std::string& path, AnswerMode mode = AnswerMode::final_number);

struct ItemResult {
    std::string query_id;
    bool failed = false;
    std::string error;
    bool correct = false;
    DebateOutcome outcome;
};

struct StrategyResult {
    std::string strategy;
    double accuracy_pct = 0.0;
    long long total_input_tokens = 0;    // context + prompt, every request
    long long history_tokens = 0;        // context portion only
    double wall_time_s = 0.0;
    int failures = 0;
    std::vector<long long> per_round_context_tokens;  // summed over items
    std::vector<ItemResult> items;
};

struct BenchmarkReport {
    std::vector<StrategyResult> rows;
};

/// Runs run_debate for every item under every strategy. Per-item failures are
/// recorded, not fatal. Items may run concurrently up to `parallelism`;
/// aggregation is an ordered fold so reports are deterministic.
BenchmarkReport run_benchmark(const DebateConfig& config, const Dataset& dataset,
                              ChatBackendIface& backend,
                              const std::vector<StrategyConfig>& strategies,
                              int parallelism = 1,
                              const Tokenizer& tokenizer = default_tokenizer());

struct CostCurve {
    std::vector<double> full_text_per_round;  // K^2 (r-1) L
    std::vector<double> summary_per_round;    // K * summary_tokens
    std::vector<double> visual_per_round;     // K * N * pages
    std::vector<double> full_text_cumulative;
    std::vector<double> summary_cumulative;
    std::vector<double> visual_cumulative;
};

/// Closed-form per-round context predictions for the three paradigms.
CostCurve predict_costs(int num_agents, int num_rounds, double avg_solution_tokens,
                        double summary_tokens_per_round = 1200.0, int vision_tokens = 256,
                        int pages = 1);

/// OLS slope of log(y) against log(x). Points with non-positive x or y are
/// rejected as a usage error.
double fit_growth_exponent(const std::vector<double>& x, const std::vector<double>& y);

/// Accuracy spread across agent counts as per-round accuracy p_r rises toward
/// a shared limit: p_r = p_limit - (p_limit - p_start) * decay^(r-1). Returns
/// max-min of the exact majority accuracy over k_values, one entry per round.
std::vector<double> convergence_spread(const std::vector<int>& k_values, int rounds,
                                       double p_start, double p_limit, double decay);

}  // namespace debatekit
