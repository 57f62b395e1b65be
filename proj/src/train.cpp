#include "debatekit/train.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "debatekit/errors.hpp"
#include "debatekit/render.hpp"
#include "debatekit/rng.hpp"

namespace debatekit {

void ToyTrainConfig::validate() const {
    if (learning_rate < 0) throw UsageError("learning_rate must be >= 0");
    if (batch_size < 1) throw UsageError("batch_size must be >= 1");
    if (steps < 1) throw UsageError("steps must be >= 1");
    if (d_f < 1 || d_h < 1 || d < 1) throw UsageError("network dims must be positive");
}

ToyDataset make_toy_dataset(int num_samples, const ToyTrainConfig& config) {
    config.validate();
    if (num_samples < 1) throw UsageError("num_samples must be >= 1");

    // frozen random encoder: 5x7 glyph bitmap (35 inputs) -> d_f features
    Rng enc_rng(Rng::stream_seed(config.seed, 0x656e63ull));
    std::vector<double> encoder(std::size_t(config.d_f) * 35);
    for (auto& v : encoder) v = enc_rng.gaussian() / std::sqrt(35.0);

    Rng head_rng(Rng::stream_seed(config.seed, 0x68656164ull));
    ToyDataset ds;
    ds.head = Tensor::zeros({10, config.d});
    for (auto& v : ds.head.data) v = head_rng.gaussian() / std::sqrt(double(config.d));

    Rng sample_rng(Rng::stream_seed(config.seed, 0x64617461ull));
    ds.features = Tensor::zeros({num_samples, config.d_f});
    ds.targets.resize(std::size_t(num_samples));
    for (int s = 0; s < num_samples; ++s) {
        int digit = int(sample_rng.next_u64() % 10);
        ds.targets[std::size_t(s)] = digit;
        const std::uint8_t* rows = font5x7::glyph(char('0' + digit));
        double pixels[35];
        for (int y = 0; y < 7; ++y)
            for (int x = 0; x < 5; ++x)
                pixels[y * 5 + x] =
                    ((rows[y] >> (4 - x)) & 1) ? 1.0 : 0.0;
        for (int i = 0; i < 35; ++i) pixels[i] += 0.05 * sample_rng.gaussian();
        for (int j = 0; j < config.d_f; ++j) {
            double acc = 0.0;
            for (int i = 0; i < 35; ++i) acc += encoder[std::size_t(j) * 35 + i] * pixels[i];
            ds.features.at2(s, j) = acc;
        }
    }
    return ds;
}

namespace {

double dataset_loss(const AdapterParams& params, const ToyDataset& ds) {
    double total = adapter_loss(params, ds.features, ds.head, ds.targets, nullptr);
    return total / ds.features.dim(0);
}

}  // namespace

TrainResult train_toy(const ToyTrainConfig& config, const ToyDataset& dataset) {
    config.validate();
    const int n = dataset.features.dim(0);
    if (dataset.features.dim(1) != config.d_f)
        throw UsageError("dataset feature width does not match config.d_f");

    TrainResult result;
    result.params = AdapterParams::seeded(config.d_f, config.d_h, config.d, config.seed);
    AdapterParams& params = result.params;

    // AdamW state
    std::vector<double> m, v;
    if (config.optimizer == Optimizer::adamw) {
        m.assign(params.param_count(), 0.0);
        v.assign(params.param_count(), 0.0);
    }

    Rng batch_rng(Rng::stream_seed(config.seed, 0x626174ull));
    result.losses.push_back(dataset_loss(params, dataset));

    Tensor batch_f;
    std::vector<int> batch_t;
    for (int step = 1; step <= config.steps; ++step) {
        const Tensor* f = &dataset.features;
        const std::vector<int>* t = &dataset.targets;
        if (config.batch_size < n) {
            batch_f = Tensor::zeros({config.batch_size, config.d_f});
            batch_t.resize(std::size_t(config.batch_size));
            for (int b = 0; b < config.batch_size; ++b) {
                int idx = int(batch_rng.next_u64() % std::uint64_t(n));
                for (int j = 0; j < config.d_f; ++j)
                    batch_f.at2(b, j) = dataset.features.at2(idx, j);
                batch_t[std::size_t(b)] = dataset.targets[std::size_t(idx)];
            }
            f = &batch_f;
            t = &batch_t;
        }

        AdapterGrads grads = AdapterGrads::zeros_like(params);
        adapter_loss(params, *f, dataset.head, *t, &grads);
        const double scale = 1.0 / f->dim(0);

        const std::size_t count = params.param_count();
        if (config.optimizer == Optimizer::sgd) {
            for (std::size_t i = 0; i < count; ++i)
                params.param(i) -= config.learning_rate * scale * grads.param(i);
        } else {
            double bc1 = 1.0 - std::pow(config.beta1, step);
            double bc2 = 1.0 - std::pow(config.beta2, step);
            for (std::size_t i = 0; i < count; ++i) {
                double g = scale * grads.param(i);
                m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g;
                v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g * g;
                double update = (m[i] / bc1) / (std::sqrt(v[i] / bc2) + 1e-8);
                // decoupled weight decay, applied directly to the parameter
                params.param(i) -=
                    config.learning_rate * (update + config.weight_decay * params.param(i));
            }
        }

        double loss = dataset_loss(params, dataset);
        if (!std::isfinite(loss))
            throw TrainingError("training diverged at step " + std::to_string(step),
                                result.losses);
        result.losses.push_back(loss);
    }
    return result;
}

}  // namespace debatekit
