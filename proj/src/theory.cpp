#include "debatekit/theory.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "debatekit/errors.hpp"
#include "debatekit/rng.hpp"

namespace debatekit {

double hoeffding_bound(int K, double p) {
    if (K < 1) throw UsageError("hoeffding_bound: K must be >= 1");
    if (p < 0.5 || p > 1.0)
        throw UsageError("hoeffding_bound: p must be in [0.5, 1] (better than chance)");
    double d = p - 0.5;
    return 1.0 - std::exp(-2.0 * K * d * d);
}

int sample_complexity(double p, double delta) {
    if (p <= 0.5 || p > 1.0) throw UsageError("sample_complexity: p must be in (0.5, 1]");
    if (delta <= 0.0 || delta >= 1.0) throw UsageError("sample_complexity: delta in (0,1)");
    double d = p - 0.5;
    double k = std::log(1.0 / delta) / (2.0 * d * d);
    long long ceiled = static_cast<long long>(std::ceil(k - 1e-12));
    return static_cast<int>(ceiled < 1 ? 1 : ceiled);
}

double majority_success_exact(int K, double p) {
    if (K < 1) throw UsageError("majority_success_exact: K must be >= 1");
    // success = at least half the agents, ties counted as success
    int threshold = (K + 1) / 2;
    double tail = 0.0;
    // iterative binomial pmf, stable at these sizes
    for (int j = threshold; j <= K; ++j) {
        double log_c = std::lgamma(K + 1.0) - std::lgamma(j + 1.0) - std::lgamma(K - j + 1.0);
        double log_term = log_c;
        if (j > 0) log_term += j * std::log(p);
        if (K - j > 0) log_term += (K - j) * std::log(1.0 - p);
        tail += std::exp(log_term);
    }
    return tail > 1.0 ? 1.0 : tail;
}

double simulate_majority(const TheoryParams& params) {
    if (params.trials < 1) throw UsageError("simulate_majority: trials must be >= 1");
    if (params.K < 1) throw UsageError("simulate_majority: K must be >= 1");
    if (params.p < 0.5 || params.p > 1.0) throw UsageError("simulate_majority: p in [0.5, 1]");

    // independent stream per (K, p) cell so grid sweeps are order-insensitive
    std::uint64_t p_bits;
    static_assert(sizeof(double) == sizeof(std::uint64_t));
    std::memcpy(&p_bits, &params.p, sizeof(p_bits));
    Rng rng(Rng::stream_seed(params.seed, p_bits ^ (std::uint64_t(params.K) << 1)));

    long long successes = 0;
    const int threshold2 = params.K;  // success iff 2 * count >= K
    for (long long t = 0; t < params.trials; ++t) {
        int count = 0;
        for (int i = 0; i < params.K; ++i) count += rng.bernoulli(params.p) ? 1 : 0;
        if (2 * count >= threshold2) ++successes;
    }
    return double(successes) / double(params.trials);
}

double plugin_mi(const std::vector<std::vector<double>>& joint_counts) {
    if (joint_counts.empty() || joint_counts[0].empty())
        throw UsageError("plugin_mi: empty table");
    const std::size_t rows = joint_counts.size(), cols = joint_counts[0].size();
    double total = 0.0;
    for (const auto& row : joint_counts) {
        if (row.size() != cols) throw UsageError("plugin_mi: ragged table");
        for (double c : row) {
            if (c < 0.0) throw UsageError("plugin_mi: negative count");
            total += c;
        }
    }
    if (total <= 0.0) throw UsageError("plugin_mi: all-zero table");

    std::vector<double> px(rows, 0.0), py(cols, 0.0);
    for (std::size_t x = 0; x < rows; ++x)
        for (std::size_t y = 0; y < cols; ++y) {
            px[x] += joint_counts[x][y] / total;
            py[y] += joint_counts[x][y] / total;
        }
    double mi = 0.0;
    for (std::size_t x = 0; x < rows; ++x)
        for (std::size_t y = 0; y < cols; ++y) {
            double pxy = joint_counts[x][y] / total;
            if (pxy <= 0.0) continue;
            mi += pxy * std::log2(pxy / (px[x] * py[y]));
        }
    return mi < 0.0 ? 0.0 : mi;
}

void BottleneckModel::validate() const {
    if (K < 1) throw UsageError("bottleneck model: K must be >= 1");
    if (p <= 0.5 || p > 1.0)
        throw UsageError("bottleneck model: signal preservation p must be in (0.5, 1]");
    if (signal_accuracy <= 0.5 || signal_accuracy > 1.0)
        throw UsageError("bottleneck model: signal_accuracy must exceed chance");
    if (gamma < 0.0 || gamma > 1.0) throw UsageError("bottleneck model: gamma in [0, 1]");
    if (coupling < 0.0 || coupling > 1.0) throw UsageError("bottleneck model: coupling in [0, 1]");
}

namespace {

double entropy2(double q) {
    double h = 0.0;
    if (q > 0.0) h -= q * std::log2(q);
    if (q < 1.0) h -= (1.0 - q) * std::log2(1.0 - q);
    return h;
}

// Per-reported-bit accuracy P(B_i = Y). The artifact route fires with
// probability `contamination`; otherwise the signal route applies, which under
// compression survives with probability p (fair coin when lost).
double bit_accuracy(double contamination, double signal_route_accuracy) {
    return contamination * 0.5 + (1.0 - contamination) * signal_route_accuracy;
}

double binom_tail(int n, double p, int threshold) {
    if (threshold <= 0) return 1.0;
    if (threshold > n) return 0.0;
    double tail = 0.0;
    for (int j = threshold; j <= n; ++j) {
        double log_c = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0);
        double log_term = log_c;
        if (j > 0) log_term += j * std::log(p);
        if (n - j > 0) log_term += (n - j) * std::log(1.0 - p);
        tail += std::exp(log_term);
    }
    return tail > 1.0 ? 1.0 : tail;
}

struct ChannelInfo {
    double i_fy = 0.0;   // I(majority; Y) in bits
    double i_fv = 0.0;   // I(majority; V_i) per agent, in bits
};

// Exact enumeration for one channel setting (contamination c, signal route
// accuracy a): Y uniform, V_i uniform and independent, B_i = V_i w.p. c, else
// = Y w.p. a. f = majority of B with ties counted as 1.
ChannelInfo enumerate_channel(int K, double c, double a) {
    const int threshold = (K + 1) / 2;  // f=1 iff sum >= ceil(K/2); ties (even K) go to 1

    // marginal P(B_i = 1 | Y = 1); Y = 0 is the mirror image
    double q1 = bit_accuracy(c, a);
    double p_f1_y1 = binom_tail(K, q1, threshold);
    double p_f1_y0 = binom_tail(K, 1.0 - q1, threshold);

    ChannelInfo info;
    {
        std::vector<std::vector<double>> joint = {
            {0.5 * (1.0 - p_f1_y0), 0.5 * p_f1_y0},
            {0.5 * (1.0 - p_f1_y1), 0.5 * p_f1_y1},
        };
        info.i_fy = plugin_mi(joint);
    }

    // condition on (Y, V_1): agent 1 has P(B_1=1 | y, v) = c v + (1-c) (y? a : 1-a);
    // the other K-1 agents keep the marginal accuracy
    std::vector<std::vector<double>> joint_fv(2, std::vector<double>(2, 0.0));
    for (int y = 0; y <= 1; ++y) {
        double acc = y ? q1 : 1.0 - q1;
        for (int v = 0; v <= 1; ++v) {
            double pb1 = c * v + (1.0 - c) * (y ? a : 1.0 - a);
            double p_f1 = pb1 * binom_tail(K - 1, acc, threshold - 1) +
                          (1.0 - pb1) * binom_tail(K - 1, acc, threshold);
            joint_fv[std::size_t(v)][1] += 0.25 * p_f1;
            joint_fv[std::size_t(v)][0] += 0.25 * (1.0 - p_f1);
        }
    }
    info.i_fv = plugin_mi(joint_fv);
    return info;
}

}  // namespace

BottleneckReport enumerate_bottleneck(const BottleneckModel& model, double epsilon) {
    model.validate();
    if (epsilon < 0.0) throw UsageError("epsilon must be >= 0");

    // Uncompressed: the signal route always carries the agent's estimate
    // (accuracy signal_accuracy); the artifact route fires w.p. coupling.
    ChannelInfo unc = enumerate_channel(model.K, model.coupling, model.signal_accuracy);
    // Compressed: artifacts pass w.p. gamma, and the signal survives
    // compression w.p. p (fair coin otherwise).
    double comp_route = model.p * model.signal_accuracy + (1.0 - model.p) * 0.5;
    ChannelInfo comp =
        enumerate_channel(model.K, model.coupling * model.gamma, comp_route);

    BottleneckReport report;
    report.I_fY_uncompressed = unc.i_fy;
    report.I_fY_compressed = comp.i_fy;
    report.I_fV_uncompressed = model.K * unc.i_fv;
    report.I_fV_compressed = model.K * comp.i_fv;

    // Bottleneck: the Bayes-optimal decoder of the uncompressed history sees
    // signal estimates and artifacts as separate fields, ignores the
    // artifacts, and takes the majority of the K estimates.
    double bayes_acc = majority_success_exact(model.K, model.signal_accuracy);
    report.I_bottleneck_estimate = 1.0 - entropy2(bayes_acc);

    // Per-agent artifact information carried by an uncompressed reported bit:
    // P(B=1 | v) = coupling*v + (1-coupling)/2 after marginalizing Y.
    double b_given_v1 = model.coupling + (1.0 - model.coupling) * 0.5;
    report.artifact_info_per_agent = 1.0 - entropy2(b_given_v1);

    report.D_uncompressed = std::fabs(report.I_fY_uncompressed - report.I_bottleneck_estimate) +
                            report.I_fV_uncompressed;
    report.D_compressed = std::fabs(report.I_fY_compressed - report.I_bottleneck_estimate) +
                          report.I_fV_compressed;
    report.distance_decreased = report.D_compressed < report.D_uncompressed;

    double margin = (1.0 - model.gamma * model.K) * report.artifact_info_per_agent - epsilon;
    report.step10_margin_satisfied =
        margin <= 0.0 || (report.D_uncompressed - report.D_compressed >= margin);
    return report;
}

BottleneckReport simulate_bottleneck(const BottleneckModel& model, const TheoryParams& params) {
    model.validate();
    if (params.trials < 1) throw UsageError("simulate_bottleneck: trials must be >= 1");

    Rng rng(Rng::stream_seed(params.seed, 0x626f74746cull));
    const int K = model.K;

    // contingency tables: [channel][v or y][f]
    double fy[2][2][2] = {};
    double fv[2][2][2] = {};  // aggregated over agents (symmetric model)

    std::vector<int> v(static_cast<std::size_t>(K));
    std::vector<int> s(static_cast<std::size_t>(K));
    for (long long t = 0; t < params.trials; ++t) {
        int y = rng.bernoulli(0.5) ? 1 : 0;
        for (int i = 0; i < K; ++i) {
            v[std::size_t(i)] = rng.bernoulli(0.5) ? 1 : 0;
            s[std::size_t(i)] = rng.bernoulli(model.signal_accuracy) ? y : 1 - y;
        }
        for (int channel = 0; channel < 2; ++channel) {  // 0 = uncompressed, 1 = compressed
            double contamination = channel ? model.coupling * model.gamma : model.coupling;
            int sum = 0;
            for (int i = 0; i < K; ++i) {
                int b;
                if (rng.bernoulli(contamination)) {
                    b = v[std::size_t(i)];
                } else if (channel && !rng.bernoulli(model.p)) {
                    b = rng.bernoulli(0.5) ? 1 : 0;  // signal lost in compression
                } else {
                    b = s[std::size_t(i)];
                }
                sum += b;
            }
            int f = (2 * sum >= K) ? 1 : 0;
            fy[channel][y][f] += 1.0;
            for (int i = 0; i < K; ++i) fv[channel][v[std::size_t(i)]][f] += 1.0;
        }
    }

    auto mi_of = [](double table[2][2]) {
        std::vector<std::vector<double>> j = {{table[0][0], table[0][1]},
                                              {table[1][0], table[1][1]}};
        return plugin_mi(j);
    };

    BottleneckReport exact = enumerate_bottleneck(model, params.epsilon);
    BottleneckReport report;
    report.I_fY_uncompressed = mi_of(fy[0]);
    report.I_fY_compressed = mi_of(fy[1]);
    report.I_fV_uncompressed = K * mi_of(fv[0]);
    report.I_fV_compressed = K * mi_of(fv[1]);
    report.I_bottleneck_estimate = exact.I_bottleneck_estimate;
    report.artifact_info_per_agent = exact.artifact_info_per_agent;
    report.D_uncompressed = std::fabs(report.I_fY_uncompressed - report.I_bottleneck_estimate) +
                            report.I_fV_uncompressed;
    report.D_compressed = std::fabs(report.I_fY_compressed - report.I_bottleneck_estimate) +
                          report.I_fV_compressed;
    report.distance_decreased = report.D_compressed < report.D_uncompressed;
    double margin =
        (1.0 - model.gamma * model.K) * report.artifact_info_per_agent - params.epsilon;
    report.step10_margin_satisfied =
        margin <= 0.0 || (report.D_uncompressed - report.D_compressed >= margin);
    return report;
}

std::vector<BoundRow> bound_table(const std::vector<double>& p_grid,
                                  const std::vector<int>& K_grid, long long trials,
                                  std::uint64_t seed) {
    if (p_grid.empty() || K_grid.empty()) throw UsageError("bound_table: empty grid");
    std::vector<BoundRow> rows;
    for (int K : K_grid) {
        for (double p : p_grid) {
            TheoryParams params;
            params.K = K;
            params.p = p;
            params.trials = trials;
            params.seed = seed;
            BoundRow row;
            row.K = K;
            row.p = p;
            row.bound = hoeffding_bound(K, p);
            row.empirical = simulate_majority(params);
            row.exact = majority_success_exact(K, p);
            double sigma = std::sqrt(row.exact * (1.0 - row.exact) / double(trials));
            row.bound_holds = row.empirical >= row.bound - 3.0 * sigma;
            if (p > 0.5) {
                int k_needed = sample_complexity(p, 0.1);
                row.complexity_consistent = hoeffding_bound(k_needed, p) >= 0.9;
            } else {
                row.complexity_consistent = true;
            }
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace debatekit
