#include "debatekit/encoder.hpp"

#include <cmath>
#include <string>

#include "debatekit/errors.hpp"
#include "debatekit/rng.hpp"

namespace debatekit {

Tensor Tensor::zeros(std::vector<int> shape) {
    Tensor t;
    std::size_t n = 1;
    for (int d : shape) {
        if (d < 1) throw ShapeError("tensor dimensions must be positive");
        n *= static_cast<std::size_t>(d);
    }
    t.shape = std::move(shape);
    t.data.assign(n, 0.0);
    return t;
}

void Tensor::check_finite(const char* where) const {
    for (double v : data)
        if (!std::isfinite(v)) throw NumericError(std::string("non-finite value in ") + where);
}

ShapeTrace trace_pipeline_shapes(int input_resolution, int patch) {
    if (patch < 1) throw ShapeError("patch size must be positive");
    if (input_resolution < patch || input_resolution % patch != 0)
        throw ShapeError("resolution " + std::to_string(input_resolution) +
                         " is not divisible by patch size " + std::to_string(patch));
    const int g = input_resolution / patch;
    if (g % 4 != 0)
        throw ShapeError("patch grid " + std::to_string(g) +
                         " is not divisible by 4 at the stride-2 neck stages");

    ShapeTrace trace;
    trace.stages.push_back({"sam_features", {768, g, g}});
    trace.stages.push_back({"neck_stage1", {256, g, g}});
    trace.stages.push_back({"neck_stage2", {512, g / 2, g / 2}});
    trace.stages.push_back({"neck_stage3", {1024, g / 4, g / 4}});
    trace.stages.push_back({"flatten", {1024, (g / 4) * (g / 4)}});
    trace.stages.push_back({"transpose", {(g / 4) * (g / 4), 1024}});
    return trace;
}

NeckWeights NeckWeights::seeded(std::uint64_t seed, int in_channels) {
    NeckWeights w;
    w.in_channels = in_channels;
    Rng rng(Rng::stream_seed(seed, 0x6e65636bull));
    auto fill = [&](std::vector<double>& v, std::size_t n, double scale) {
        v.resize(n);
        for (auto& x : v) x = rng.gaussian() * scale;
    };
    // fan-in scaling keeps activations O(1) through the stack
    fill(w.w1, std::size_t(256) * in_channels, 1.0 / std::sqrt(double(in_channels)));
    fill(w.w2, std::size_t(256) * 256 * 9, 1.0 / std::sqrt(256.0 * 9));
    fill(w.w3, std::size_t(512) * 256 * 9, 1.0 / std::sqrt(256.0 * 9));
    fill(w.w4, std::size_t(1024) * 512 * 9, 1.0 / std::sqrt(512.0 * 9));
    return w;
}

namespace {

// LayerNorm over the channel axis at each spatial position, identity affine.
void layernorm2d(Tensor& t, double eps = 1e-6) {
    const int c = t.dim(0), h = t.dim(1), w = t.dim(2);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double mean = 0.0;
            for (int ch = 0; ch < c; ++ch) mean += t.at3(ch, y, x);
            mean /= c;
            double var = 0.0;
            for (int ch = 0; ch < c; ++ch) {
                double d = t.at3(ch, y, x) - mean;
                var += d * d;
            }
            var /= c;
            double inv = 1.0 / std::sqrt(var + eps);
            for (int ch = 0; ch < c; ++ch) t.at3(ch, y, x) = (t.at3(ch, y, x) - mean) * inv;
        }
    }
}

Tensor conv1x1(const Tensor& in, const std::vector<double>& w, int out_c) {
    const int in_c = in.dim(0), h = in.dim(1), wd = in.dim(2);
    Tensor out = Tensor::zeros({out_c, h, wd});
    for (int oc = 0; oc < out_c; ++oc)
        for (int ic = 0; ic < in_c; ++ic) {
            double k = w[std::size_t(oc) * in_c + ic];
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < wd; ++x) out.at3(oc, y, x) += k * in.at3(ic, y, x);
        }
    return out;
}

Tensor conv3x3(const Tensor& in, const std::vector<double>& w, int out_c, int stride) {
    const int in_c = in.dim(0), h = in.dim(1), wd = in.dim(2);
    const int oh = (h + 2 - 3) / stride + 1;
    const int ow = (wd + 2 - 3) / stride + 1;
    Tensor out = Tensor::zeros({out_c, oh, ow});
    for (int oc = 0; oc < out_c; ++oc)
        for (int ic = 0; ic < in_c; ++ic) {
            const double* k = &w[(std::size_t(oc) * in_c + ic) * 9];
            for (int oy = 0; oy < oh; ++oy)
                for (int ox = 0; ox < ow; ++ox) {
                    double acc = 0.0;
                    for (int ky = 0; ky < 3; ++ky) {
                        int iy = oy * stride + ky - 1;
                        if (iy < 0 || iy >= h) continue;
                        for (int kx = 0; kx < 3; ++kx) {
                            int ix = ox * stride + kx - 1;
                            if (ix < 0 || ix >= wd) continue;
                            acc += k[ky * 3 + kx] * in.at3(ic, iy, ix);
                        }
                    }
                    out.at3(oc, oy, ox) += acc;
                }
        }
    return out;
}

}  // namespace

Tensor conv2d_reference(const Tensor& input, const std::vector<double>& kernel, int out_channels,
                        int kernel_size, int stride) {
    const int in_c = input.dim(0), h = input.dim(1), w = input.dim(2);
    const int pad = (kernel_size - 1) / 2;
    const int oh = (h + 2 * pad - kernel_size) / stride + 1;
    const int ow = (w + 2 * pad - kernel_size) / stride + 1;
    if (kernel.size() != std::size_t(out_channels) * in_c * kernel_size * kernel_size)
        throw ShapeError("conv2d_reference: kernel size mismatch");
    Tensor out = Tensor::zeros({out_channels, oh, ow});
    for (int oc = 0; oc < out_channels; ++oc)
        for (int oy = 0; oy < oh; ++oy)
            for (int ox = 0; ox < ow; ++ox) {
                double acc = 0.0;
                for (int ic = 0; ic < in_c; ++ic)
                    for (int ky = 0; ky < kernel_size; ++ky)
                        for (int kx = 0; kx < kernel_size; ++kx) {
                            int iy = oy * stride + ky - pad;
                            int ix = ox * stride + kx - pad;
                            if (iy < 0 || iy >= h || ix < 0 || ix >= w) continue;
                            acc += kernel[((std::size_t(oc) * in_c + ic) * kernel_size + ky) *
                                              kernel_size +
                                          kx] *
                                   input.at3(ic, iy, ix);
                        }
                out.at3(oc, oy, ox) = acc;
            }
    return out;
}

Tensor neck_forward(const Tensor& f_sam, const NeckWeights& weights) {
    if (f_sam.shape.size() != 3) throw ShapeError("neck_forward expects a [C, g, g] tensor");
    if (f_sam.dim(0) != weights.in_channels)
        throw ShapeError("neck_forward: input has " + std::to_string(f_sam.dim(0)) +
                         " channels, weights expect " + std::to_string(weights.in_channels));
    if (f_sam.dim(1) != f_sam.dim(2) || f_sam.dim(1) % 4 != 0)
        throw ShapeError("neck_forward: grid must be square with side divisible by 4");

    Tensor x = conv1x1(f_sam, weights.w1, 256);
    layernorm2d(x);
    x = conv3x3(x, weights.w2, 256, 1);
    x = conv3x3(x, weights.w3, 512, 2);
    layernorm2d(x);
    x = conv3x3(x, weights.w4, 1024, 2);
    layernorm2d(x);
    x.check_finite("neck_forward");
    return x;
}

namespace {

// Catmull-Rom cubic, a = -0.5
double cubic_weight(double t) {
    const double a = -0.5;
    double at = std::fabs(t);
    if (at <= 1.0) return (a + 2.0) * at * at * at - (a + 3.0) * at * at + 1.0;
    if (at < 2.0) return a * at * at * at - 5.0 * a * at * at + 8.0 * a * at - 4.0 * a;
    return 0.0;
}

}  // namespace

Tensor interpolate_pos_embed(const Tensor& grid, int target) {
    if (grid.shape.size() != 3 || grid.dim(0) != grid.dim(1))
        throw ShapeError("interpolate_pos_embed expects a [g, g, c] tensor");
    if (grid.dim(0) < 2) throw ShapeError("source grid must be at least 2x2");
    if (target < 1) throw ShapeError("target grid must be >= 1");

    const int g0 = grid.dim(0), c = grid.dim(2);
    if (target == g0) return grid;  // identity resampling

    Tensor out = Tensor::zeros({target, target, c});
    // virtual samples one step past the borders (the kernel never reaches
    // further) are linearly extrapolated, keeping the resampler exact on
    // degree-1 ramps all the way to the edge
    auto fetch = [&](auto&& self, int y, int x, int ch) -> double {
        if (y == -1) return 2.0 * self(self, 0, x, ch) - self(self, 1, x, ch);
        if (y == g0) return 2.0 * self(self, g0 - 1, x, ch) - self(self, g0 - 2, x, ch);
        if (x == -1) return 2.0 * self(self, y, 0, ch) - self(self, y, 1, ch);
        if (x == g0) return 2.0 * self(self, y, g0 - 1, ch) - self(self, y, g0 - 2, ch);
        return grid.at3(y, x, ch);
    };
    // align-corners source coordinate: identical endpoints, so constant and
    // low-degree polynomial grids are reproduced exactly
    const double scale = target > 1 ? double(g0 - 1) / double(target - 1) : 0.0;
    for (int oy = 0; oy < target; ++oy) {
        double sy = oy * scale;
        int y0 = int(std::floor(sy));
        double fy = sy - y0;
        for (int ox = 0; ox < target; ++ox) {
            double sx = ox * scale;
            int x0 = int(std::floor(sx));
            double fx = sx - x0;
            for (int ch = 0; ch < c; ++ch) {
                double acc = 0.0;
                for (int m = -1; m <= 2; ++m) {
                    double wy = cubic_weight(fy - m);
                    if (wy == 0.0) continue;
                    for (int n = -1; n <= 2; ++n) {
                        double wx = cubic_weight(fx - n);
                        if (wx == 0.0) continue;
                        acc += wy * wx * fetch(fetch, y0 + m, x0 + n, ch);
                    }
                }
                out.at3(oy, ox, ch) = acc;
            }
        }
    }
    return out;
}

Tensor fuse(const Tensor& f_clip, const Tensor& f_neck) {
    if (f_clip.shape != f_neck.shape) throw ShapeError("fuse: shapes differ");
    Tensor out = f_clip;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += f_neck.data[i];
    return out;
}

double gelu(double x) { return x * 0.5 * (1.0 + std::erf(x / 1.4142135623730950488)); }

double gelu_grad(double x) {
    double phi_cdf = 0.5 * (1.0 + std::erf(x / 1.4142135623730950488));
    double phi_pdf = std::exp(-0.5 * x * x) / 2.5066282746310005024;
    return phi_cdf + x * phi_pdf;
}

}  // namespace debatekit
