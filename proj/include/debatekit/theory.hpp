#pragma once

#include <cstdint>
#include <vector>

namespace debatekit {

struct TheoryParams {
    int K = 5;
    double p = 0.9;        // per-agent preservation probability, must exceed 1/2
    double epsilon = 0.0;  // information slack
    double gamma = 0.1;    // artifact reduction factor of the compressor
    double delta = 0.1;    // failure probability
    long long trials = 100000;
    std::uint64_t seed = 0;
};

/// 1 - exp(-2K(p - 1/2)^2): lower bound on the probability that a majority of
/// K agents preserves its information.
double hoeffding_bound(int K, double p);

/// Smallest K certified by the bound to succeed with probability >= 1 - delta:
/// ceil(ln(1/delta) / (2(p - 1/2)^2)), floored at one agent.
int sample_complexity(double p, double delta);

/// Monte Carlo estimate of P(S_K >= 1/2) where S_K is the mean of K
/// independent Bernoulli(p) indicators. Ties at exactly 1/2 count as success.
double simulate_majority(const TheoryParams& params);

/// Exact binomial tail P(X >= ceil(K/2)) for X ~ Bin(K, p), the closed-form
/// oracle simulate_majority is checked against.
double majority_success_exact(int K, double p);

/// Plug-in mutual information in bits over a joint contingency table
/// (counts or probabilities; rows x, columns y). 0 log 0 := 0.
double plugin_mi(const std::vector<std::vector<double>>& joint_counts);

/// Discrete channel family built to satisfy the independence and
/// better-than-chance assumptions so every claim is mechanically checkable.
/// Answer Y ~ Bernoulli(1/2). Each agent i carries an artifact bit
/// V_i ~ Bernoulli(1/2), independent of everything else. The agent's reported
/// bit B_i copies V_i with probability coupling * g (g = gamma under
/// compression, 1 without); otherwise it follows the signal channel: with
/// probability p the signal survives and B_i equals Y with probability
/// signal_accuracy, with probability 1-p the bit is a fair coin. The
/// aggregate f is the majority over B_1..B_K.
struct BottleneckModel {
    int K = 5;
    double p = 0.9;
    double gamma = 0.1;
    double signal_accuracy = 0.85;
    double coupling = 0.78;  // artifact strength; 0.78 puts I(B_i;V_i) near 0.5 bits

    void validate() const;
};

struct BottleneckReport {
    double I_fY_compressed = 0.0;
    double I_fY_uncompressed = 0.0;
    double I_fV_compressed = 0.0;    // summed over the K agents
    double I_fV_uncompressed = 0.0;
    double D_compressed = 0.0;
    double D_uncompressed = 0.0;
    double I_bottleneck_estimate = 0.0;
    double artifact_info_per_agent = 0.0;  // I(B_i; V_i) without compression
    bool distance_decreased = false;
    bool step10_margin_satisfied = false;  // D_unc - D_comp >= (1 - gamma K) I_V - eps
};

/// Exact enumeration of the model's joint distribution, zero sampling noise.
BottleneckReport enumerate_bottleneck(const BottleneckModel& model, double epsilon);

/// Sampling counterpart using the plug-in estimator; agrees with the exact
/// enumeration up to Monte Carlo error.
BottleneckReport simulate_bottleneck(const BottleneckModel& model, const TheoryParams& params);

struct BoundRow {
    int K = 0;
    double p = 0.0;
    double bound = 0.0;
    double empirical = 0.0;
    double exact = 0.0;
    bool bound_holds = false;        // empirical >= bound - 3 sigma
    bool complexity_consistent = false;
};

std::vector<BoundRow> bound_table(const std::vector<double>& p_grid,
                                  const std::vector<int>& K_grid, long long trials,
                                  std::uint64_t seed);

}  // namespace debatekit
