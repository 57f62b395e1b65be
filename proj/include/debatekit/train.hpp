#pragma once

#include <cstdint>
#include <vector>

#include "debatekit/adapter.hpp"

namespace debatekit {

enum class Optimizer { sgd, adamw };

struct ToyTrainConfig {
    double learning_rate = 1e-4;
    int batch_size = 64;
    int steps = 2000;
    Optimizer optimizer = Optimizer::adamw;
    std::uint64_t seed = 0;
    double weight_decay = 0.01;  // decoupled, AdamW only
    double beta1 = 0.9;
    double beta2 = 0.999;
    // desk-scale network dims; only the adapter trains
    int d_f = 16;
    int d_h = 32;
    int d = 16;

    void validate() const;
};

/// Synthetic task: rendered digit glyphs pushed through a frozen random
/// encoder; a frozen linear softmax head stands in for the decoder. Only the
/// adapter between them is trainable.
struct ToyDataset {
    Tensor features;          // [n, d_f]
    std::vector<int> targets; // digit class 0..9
    Tensor head;              // [10, d]
};

ToyDataset make_toy_dataset(int num_samples, const ToyTrainConfig& config);

struct TrainResult {
    std::vector<double> losses;  // full-dataset mean loss, one entry per step + initial
    AdapterParams params;
};

TrainResult train_toy(const ToyTrainConfig& config, const ToyDataset& dataset);

}  // namespace debatekit
