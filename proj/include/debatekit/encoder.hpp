#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace debatekit {

/// Dense row-major tensor of doubles. Small enough on purpose; the numerical
/// core runs at desk scale where clarity beats throughput.
struct Tensor {
    std::vector<int> shape;
    std::vector<double> data;

    static Tensor zeros(std::vector<int> shape);

    std::size_t size() const { return data.size(); }
    int dim(int i) const { return shape[static_cast<std::size_t>(i)]; }

    double& at3(int a, int b, int c) {
        return data[(std::size_t(a) * dim(1) + b) * dim(2) + c];
    }
    double at3(int a, int b, int c) const {
        return data[(std::size_t(a) * dim(1) + b) * dim(2) + c];
    }
    double& at2(int a, int b) { return data[std::size_t(a) * dim(1) + b]; }
    double at2(int a, int b) const { return data[std::size_t(a) * dim(1) + b]; }

    void check_finite(const char* where) const;
};

struct ShapeTrace {
    std::vector<std::pair<std::string, std::vector<int>>> stages;

    const std::vector<int>& final_shape() const { return stages.back().second; }
};

/// Stage chain of the visual encoder for a square input:
/// [768, g, g] -> [256, g, g] -> [512, g/2, g/2] -> [1024, g/4, g/4]
/// -> flatten/transpose -> [(g/4)^2 tokens, 1024], with g = resolution/patch.
ShapeTrace trace_pipeline_shapes(int input_resolution, int patch = 16);

/// Frozen random weights for the three neck stages, drawn once from a seeded
/// generator. Stage 1: 1x1 conv 768->256, LayerNorm2d, 3x3 conv 256->256.
/// Stages 2-3: 3x3 conv stride 2 (256->512, 512->1024), each followed by
/// LayerNorm2d.
struct NeckWeights {
    int in_channels = 768;
    std::vector<double> w1;  // [256, in]          1x1
    std::vector<double> w2;  // [256, 256, 3, 3]
    std::vector<double> w3;  // [512, 256, 3, 3]   stride 2
    std::vector<double> w4;  // [1024, 512, 3, 3]  stride 2

    static NeckWeights seeded(std::uint64_t seed, int in_channels = 768);
};

Tensor neck_forward(const Tensor& f_sam, const NeckWeights& weights);

/// Channel-wise bicubic resampling of a [g0, g0, c] grid to [g1, g1, c]
/// (Catmull-Rom kernel, a = -0.5, linear extrapolation past the borders, so
/// constant and linear grids resample exactly). g0 == g1 is the identity.
Tensor interpolate_pos_embed(const Tensor& grid, int target);

/// Residual fusion f = f_clip + f_neck (elementwise, shapes must match).
Tensor fuse(const Tensor& f_clip, const Tensor& f_neck);

/// Exact Gaussian GELU x * Phi(x) and its derivative.
double gelu(double x);
double gelu_grad(double x);

/// Direct nested-loop 2-D convolution, used as the oracle the fast path is
/// checked against. Input [Cin, H, W], kernel [Cout, Cin, k, k], padding
/// (k-1)/2, no bias.
Tensor conv2d_reference(const Tensor& input, const std::vector<double>& kernel, int out_channels,
                        int kernel_size, int stride);

}  // namespace debatekit
