#pragma once

#include <cstdint>
#include <vector>

#include "debatekit/encoder.hpp"

namespace debatekit {

/// Two-layer MLP projector z = LayerNorm(W2 * GELU(W1 f + b1) + b2).
/// The LayerNorm scale/shift are fixed at identity.
struct AdapterParams {
    int d_f = 1024;   // input width
    int d_h = 4096;   // hidden width
    int d = 4096;     // output width
    double eps = 1e-5;
    std::vector<double> w1;  // [d_h, d_f]
    std::vector<double> b1;  // [d_h]
    std::vector<double> w2;  // [d, d_h]
    std::vector<double> b2;  // [d]

    static AdapterParams seeded(int d_f, int d_h, int d, std::uint64_t seed);
    void validate() const;

    std::size_t param_count() const { return w1.size() + b1.size() + w2.size() + b2.size(); }
    /// Flat view over (w1, b1, w2, b2) in that order, for the optimizer and
    /// the finite-difference loop.
    double& param(std::size_t i);
};

/// Forward pass over a batch f of shape [n, d_f]; returns [n, d].
Tensor adapter_forward(const AdapterParams& params, const Tensor& f);

/// Summed cross-entropy -sum_t log softmax(logits_t)[target_t], natural log.
double reconstruction_loss(const Tensor& logits, const std::vector<int>& target);

struct AdapterGrads {
    std::vector<double> w1, b1, w2, b2;

    static AdapterGrads zeros_like(const AdapterParams& params);
    double& param(std::size_t i);
};

/// Full training objective at desk scale: adapter -> frozen linear head
/// [V, d] -> cross-entropy. Returns the loss; fills grads with the analytic
/// backward pass when non-null.
double adapter_loss(const AdapterParams& params, const Tensor& f, const Tensor& head,
                    const std::vector<int>& targets, AdapterGrads* grads);

/// Max relative error between the analytic gradient and central finite
/// differences over every parameter, denominator max(|a|, |g|, 1e-8).
double grad_check(const AdapterParams& params, const Tensor& f, const Tensor& head,
                  const std::vector<int>& targets, double h = 1e-5);

}  // namespace debatekit
