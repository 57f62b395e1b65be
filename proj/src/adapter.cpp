#include "debatekit/adapter.hpp"

#include <algorithm>
#include <cmath>

#include "debatekit/errors.hpp"
#include "debatekit/rng.hpp"

namespace debatekit {

AdapterParams AdapterParams::seeded(int d_f, int d_h, int d, std::uint64_t seed) {
    AdapterParams p;
    p.d_f = d_f;
    p.d_h = d_h;
    p.d = d;
    Rng rng(Rng::stream_seed(seed, 0x61646170ull));
    p.w1.resize(std::size_t(d_h) * d_f);
    p.b1.assign(std::size_t(d_h), 0.0);
    p.w2.resize(std::size_t(d) * d_h);
    p.b2.assign(std::size_t(d), 0.0);
    double s1 = 1.0 / std::sqrt(double(d_f));
    double s2 = 1.0 / std::sqrt(double(d_h));
    for (auto& v : p.w1) v = rng.gaussian() * s1;
    for (auto& v : p.w2) v = rng.gaussian() * s2;
    p.validate();
    return p;
}

void AdapterParams::validate() const {
    if (d_f < 1 || d_h < 1 || d < 1) throw ShapeError("adapter dims must be positive");
    if (eps <= 0) throw ShapeError("layer-norm epsilon must be positive");
    if (w1.size() != std::size_t(d_h) * d_f || b1.size() != std::size_t(d_h) ||
        w2.size() != std::size_t(d) * d_h || b2.size() != std::size_t(d))
        throw ShapeError("adapter parameter shapes inconsistent with dims");
}

double& AdapterParams::param(std::size_t i) {
    if (i < w1.size()) return w1[i];
    i -= w1.size();
    if (i < b1.size()) return b1[i];
    i -= b1.size();
    if (i < w2.size()) return w2[i];
    i -= w2.size();
    return b2[i];
}

AdapterGrads AdapterGrads::zeros_like(const AdapterParams& params) {
    AdapterGrads g;
    g.w1.assign(params.w1.size(), 0.0);
    g.b1.assign(params.b1.size(), 0.0);
    g.w2.assign(params.w2.size(), 0.0);
    g.b2.assign(params.b2.size(), 0.0);
    return g;
}

double& AdapterGrads::param(std::size_t i) {
    if (i < w1.size()) return w1[i];
    i -= w1.size();
    if (i < b1.size()) return b1[i];
    i -= b1.size();
    if (i < w2.size()) return w2[i];
    i -= w2.size();
    return b2[i];
}

namespace {

struct RowActivations {
    std::vector<double> h1;    // pre-GELU hidden
    std::vector<double> act;   // GELU(h1)
    std::vector<double> y;     // pre-norm output
    std::vector<double> z;     // normalized output
    double inv_sigma = 0.0;
};

RowActivations forward_row(const AdapterParams& p, const double* f) {
    RowActivations r;
    r.h1.resize(std::size_t(p.d_h));
    r.act.resize(std::size_t(p.d_h));
    for (int j = 0; j < p.d_h; ++j) {
        double acc = p.b1[std::size_t(j)];
        const double* w = &p.w1[std::size_t(j) * p.d_f];
        for (int i = 0; i < p.d_f; ++i) acc += w[i] * f[i];
        r.h1[std::size_t(j)] = acc;
        r.act[std::size_t(j)] = gelu(acc);
    }
    r.y.resize(std::size_t(p.d));
    for (int o = 0; o < p.d; ++o) {
        double acc = p.b2[std::size_t(o)];
        const double* w = &p.w2[std::size_t(o) * p.d_h];
        for (int j = 0; j < p.d_h; ++j) acc += w[j] * r.act[std::size_t(j)];
        r.y[std::size_t(o)] = acc;
    }
    double mean = 0.0;
    for (double v : r.y) mean += v;
    mean /= p.d;
    double var = 0.0;
    for (double v : r.y) var += (v - mean) * (v - mean);
    var /= p.d;
    r.inv_sigma = 1.0 / std::sqrt(var + p.eps);
    r.z.resize(std::size_t(p.d));
    for (int o = 0; o < p.d; ++o) r.z[std::size_t(o)] = (r.y[std::size_t(o)] - mean) * r.inv_sigma;
    for (double v : r.z)
        if (!std::isfinite(v)) throw NumericError("non-finite adapter output");
    return r;
}

}  // namespace

Tensor adapter_forward(const AdapterParams& params, const Tensor& f) {
    params.validate();
    if (f.shape.size() != 2 || f.dim(1) != params.d_f)
        throw ShapeError("adapter_forward expects [n, d_f] input");
    const int n = f.dim(0);
    Tensor out = Tensor::zeros({n, params.d});
    for (int row = 0; row < n; ++row) {
        RowActivations acts = forward_row(params, &f.data[std::size_t(row) * params.d_f]);
        std::copy(acts.z.begin(), acts.z.end(), out.data.begin() + std::size_t(row) * params.d);
    }
    return out;
}

double reconstruction_loss(const Tensor& logits, const std::vector<int>& target) {
    if (logits.shape.size() != 2) throw ShapeError("reconstruction_loss expects [n, V] logits");
    const int n = logits.dim(0), vocab = logits.dim(1);
    if (target.size() != std::size_t(n))
        throw ShapeError("target length does not match logits rows");
    double loss = 0.0;
    for (int row = 0; row < n; ++row) {
        int t = target[std::size_t(row)];
        if (t < 0 || t >= vocab) throw UsageError("target id out of vocabulary range");
        const double* l = &logits.data[std::size_t(row) * vocab];
        double m = *std::max_element(l, l + vocab);
        double sum = 0.0;
        for (int v = 0; v < vocab; ++v) sum += std::exp(l[v] - m);
        loss += std::log(sum) - (l[t] - m);
    }
    return loss;
}

double adapter_loss(const AdapterParams& params, const Tensor& f, const Tensor& head,
                    const std::vector<int>& targets, AdapterGrads* grads) {
    params.validate();
    if (f.shape.size() != 2 || f.dim(1) != params.d_f)
        throw ShapeError("adapter_loss expects [n, d_f] features");
    if (head.shape.size() != 2 || head.dim(1) != params.d)
        throw ShapeError("head must be [V, d]");
    const int n = f.dim(0), vocab = head.dim(0);
    if (targets.size() != std::size_t(n)) throw ShapeError("targets length mismatch");

    double loss = 0.0;
    std::vector<double> logits(static_cast<std::size_t>(vocab));
    std::vector<double> dz(static_cast<std::size_t>(params.d));
    std::vector<double> dy(static_cast<std::size_t>(params.d));
    std::vector<double> da(static_cast<std::size_t>(params.d_h));
    for (int row = 0; row < n; ++row) {
        const double* frow = &f.data[std::size_t(row) * params.d_f];
        RowActivations acts = forward_row(params, frow);

        double m = -1e300;
        for (int v = 0; v < vocab; ++v) {
            double acc = 0.0;
            const double* hw = &head.data[std::size_t(v) * params.d];
            for (int o = 0; o < params.d; ++o) acc += hw[o] * acts.z[std::size_t(o)];
            logits[std::size_t(v)] = acc;
            m = std::max(m, acc);
        }
        int t = targets[std::size_t(row)];
        if (t < 0 || t >= vocab) throw UsageError("target id out of vocabulary range");
        double sum = 0.0;
        for (int v = 0; v < vocab; ++v) sum += std::exp(logits[std::size_t(v)] - m);
        loss += std::log(sum) - (logits[std::size_t(t)] - m);
        if (!grads) continue;

        // dlogits = softmax - onehot, folded straight into dz
        std::fill(dz.begin(), dz.end(), 0.0);
        for (int v = 0; v < vocab; ++v) {
            double dlogit = std::exp(logits[std::size_t(v)] - m) / sum - (v == t ? 1.0 : 0.0);
            const double* hw = &head.data[std::size_t(v) * params.d];
            for (int o = 0; o < params.d; ++o) dz[std::size_t(o)] += dlogit * hw[o];
        }
        // LayerNorm backward (identity affine):
        // dy = inv_sigma * (dz - mean(dz) - z * mean(dz*z))
        double mean_dz = 0.0, mean_dzz = 0.0;
        for (int o = 0; o < params.d; ++o) {
            mean_dz += dz[std::size_t(o)];
            mean_dzz += dz[std::size_t(o)] * acts.z[std::size_t(o)];
        }
        mean_dz /= params.d;
        mean_dzz /= params.d;
        for (int o = 0; o < params.d; ++o)
            dy[std::size_t(o)] = acts.inv_sigma * (dz[std::size_t(o)] - mean_dz -
                                                   acts.z[std::size_t(o)] * mean_dzz);
        std::fill(da.begin(), da.end(), 0.0);
        for (int o = 0; o < params.d; ++o) {
            grads->b2[std::size_t(o)] += dy[std::size_t(o)];
            double* gw = &grads->w2[std::size_t(o) * params.d_h];
            const double* w = &params.w2[std::size_t(o) * params.d_h];
            for (int j = 0; j < params.d_h; ++j) {
                gw[j] += dy[std::size_t(o)] * acts.act[std::size_t(j)];
                da[std::size_t(j)] += w[j] * dy[std::size_t(o)];
            }
        }
        for (int j = 0; j < params.d_h; ++j) {
            double dh1 = da[std::size_t(j)] * gelu_grad(acts.h1[std::size_t(j)]);
            grads->b1[std::size_t(j)] += dh1;
            double* gw = &grads->w1[std::size_t(j) * params.d_f];
            for (int i = 0; i < params.d_f; ++i) gw[i] += dh1 * frow[i];
        }
    }
    if (!std::isfinite(loss)) throw NumericError("non-finite adapter loss");
    return loss;
}

double grad_check(const AdapterParams& params, const Tensor& f, const Tensor& head,
                  const std::vector<int>& targets, double h) {
    AdapterGrads analytic = AdapterGrads::zeros_like(params);
    adapter_loss(params, f, head, targets, &analytic);

    AdapterParams probe = params;
    double max_rel = 0.0;
    const std::size_t n = params.param_count();
    for (std::size_t i = 0; i < n; ++i) {
        double saved = probe.param(i);
        probe.param(i) = saved + h;
        double up = adapter_loss(probe, f, head, targets, nullptr);
        probe.param(i) = saved - h;
        double down = adapter_loss(probe, f, head, targets, nullptr);
        probe.param(i) = saved;
        double numeric = (up - down) / (2.0 * h);
        double a = analytic.param(i);
        double rel = std::fabs(a - numeric) / std::max({std::fabs(a), std::fabs(numeric), 1e-8});
        max_rel = std::max(max_rel, rel);
    }
    return max_rel;
}

}  // namespace debatekit
