#include "rumour/mlp.hpp"

#include <algorithm>
#include <cmath>

#include "rumour/error.hpp"

namespace rumour {

namespace {

// z = x * W + b with W stored [in][out].
void dense_forward(const Matrix& x, std::span<const double> w, std::span<const double> b, Matrix& z) {
    const std::size_t in = x.cols(), out = b.size();
    z = Matrix(x.rows(), out);
    for (std::size_t r = 0; r < x.rows(); ++r) {
        auto zr = z.row(r);
        std::copy(b.begin(), b.end(), zr.begin());
        const auto xr = x.row(r);
        for (std::size_t i = 0; i < in; ++i) {
            const double xi = xr[i];
            if (xi == 0.0) continue;
            const double* wi = w.data() + i * out;
            for (std::size_t o = 0; o < out; ++o) zr[o] += xi * wi[o];
        }
    }
}

// Accumulates dW, db from dz and, when dx is non-null, writes dx = dz * W^T.
void dense_backward(const Matrix& x, std::span<const double> w, const Matrix& dz, std::span<double> dw,
                    std::span<double> db, Matrix* dx) {
    const std::size_t in = x.cols(), out = dz.cols();
    if (dx) *dx = Matrix(x.rows(), in);
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const auto xr = x.row(r);
        const auto dzr = dz.row(r);
        for (std::size_t o = 0; o < out; ++o) db[o] += dzr[o];
        for (std::size_t i = 0; i < in; ++i) {
            const double xi = xr[i];
            double* dwi = dw.data() + i * out;
            if (xi != 0.0)
                for (std::size_t o = 0; o < out; ++o) dwi[o] += xi * dzr[o];
            if (dx) {
                const double* wi = w.data() + i * out;
                double acc = 0.0;
                for (std::size_t o = 0; o < out; ++o) acc += dzr[o] * wi[o];
                (*dx)(r, i) = acc;
            }
        }
    }
}

void relu_dropout(const Matrix& z, Matrix& h, Matrix& mask, bool training, double p, Rng& rng) {
    h = z;
    for (double& v : h.data()) v = v > 0.0 ? v : 0.0;
    mask = Matrix(z.rows(), z.cols(), 1.0);
    if (training) apply_dropout(h.data(), mask.data(), p, rng);
}

void check_input(const MlpParams& params, const Matrix& x) {
    if (x.cols() != params.shape().input)
        throw DimensionError("mlp input has " + std::to_string(x.cols()) + " columns, model expects " +
                             std::to_string(params.shape().input));
}

}  // namespace

MlpParams::MlpParams(const MlpShape& shape) : shape_(shape) {
    const std::array<std::size_t, kTensors> sizes = {
        shape.input * shape.hidden1, shape.hidden1, shape.hidden1 * shape.hidden2, shape.hidden2,
        shape.hidden2 * MlpShape::output, MlpShape::output,
    };
    offsets_[0] = 0;
    for (std::size_t t = 0; t < kTensors; ++t) offsets_[t + 1] = offsets_[t] + sizes[t];
    values_.assign(offsets_[kTensors], 0.0);
}

MlpParams MlpParams::initialise(const MlpShape& shape, Rng& rng) {
    MlpParams p(shape);
    for (std::size_t t = 0; t < kTensors; t += 2) {
        const auto [fan_in, fan_out] = p.tensor_shape(t);
        const bool output_layer = t == 4;
        const double stddev = output_layer ? std::sqrt(2.0 / static_cast<double>(fan_in + fan_out))
                                           : std::sqrt(2.0 / static_cast<double>(fan_in));
        for (double& w : p.tensor(t)) w = rng.normal() * stddev;
    }
    return p;
}

std::span<double> MlpParams::tensor(std::size_t t) {
    return std::span<double>(values_).subspan(offsets_.at(t), offsets_.at(t + 1) - offsets_.at(t));
}

std::span<const double> MlpParams::tensor(std::size_t t) const {
    return std::span<const double>(values_).subspan(offsets_.at(t), offsets_.at(t + 1) - offsets_.at(t));
}

std::pair<std::size_t, std::size_t> MlpParams::tensor_shape(std::size_t t) const {
    switch (t) {
        case 0: return {shape_.input, shape_.hidden1};
        case 1: return {1, shape_.hidden1};
        case 2: return {shape_.hidden1, shape_.hidden2};
        case 3: return {1, shape_.hidden2};
        case 4: return {shape_.hidden2, MlpShape::output};
        case 5: return {1, MlpShape::output};
        default: throw DimensionError("mlp has no tensor " + std::to_string(t));
    }
}

std::string_view MlpParams::tensor_name(std::size_t t) {
    static constexpr std::array<std::string_view, kTensors> names = {"W1", "b1", "W2", "b2", "W3", "b3"};
    return names.at(t);
}

double MlpParams::weight_sq_norm() const {
    double sum = 0.0;
    for (std::size_t t = 0; t < kTensors; t += 2)
        for (const double w : tensor(t)) sum += w * w;
    return sum;
}

void apply_dropout(std::span<double> values, std::span<double> mask, double p, Rng& rng) {
    if (values.size() != mask.size()) throw DimensionError("dropout mask size mismatch");
    if (p <= 0.0) {
        std::fill(mask.begin(), mask.end(), 1.0);
        return;
    }
    const double keep_scale = 1.0 / (1.0 - p);
    for (std::size_t i = 0; i < values.size(); ++i) {
        mask[i] = rng.uniform01() < p ? 0.0 : keep_scale;
        values[i] *= mask[i];
    }
}

void softmax_rows(const Matrix& logits, Matrix& probs) {
    probs = Matrix(logits.rows(), logits.cols());
    for (std::size_t r = 0; r < logits.rows(); ++r) {
        const auto in = logits.row(r);
        auto out = probs.row(r);
        const double mx = *std::max_element(in.begin(), in.end());
        double sum = 0.0;
        for (std::size_t c = 0; c < in.size(); ++c) sum += (out[c] = std::exp(in[c] - mx));
        for (double& v : out) v /= sum;
    }
}

MlpActivations mlp_forward(const MlpParams& params, const Matrix& x, bool training, double dropout_p, Rng& rng) {
    check_input(params, x);
    MlpActivations a;
    a.input = x;
    dense_forward(x, params.tensor(0), params.tensor(1), a.z1);
    relu_dropout(a.z1, a.h1, a.mask1, training, dropout_p, rng);
    dense_forward(a.h1, params.tensor(2), params.tensor(3), a.z2);
    relu_dropout(a.z2, a.h2, a.mask2, training, dropout_p, rng);
    dense_forward(a.h2, params.tensor(4), params.tensor(5), a.logits);
    softmax_rows(a.logits, a.probs);
    return a;
}

MlpActivations mlp_forward(const MlpParams& params, const Matrix& x, bool training, double dropout_p,
                           std::uint64_t seed) {
    Rng rng(seed);
    return mlp_forward(params, x, training, dropout_p, rng);
}

std::vector<double> mlp_backward(const MlpParams& params, const MlpActivations& a, std::span<const int> targets,
                                 double weight_decay) {
    const std::size_t batch = a.input.rows();
    if (targets.size() != batch) throw DimensionError("mlp_backward: target count differs from batch size");
    if (a.probs.cols() != MlpShape::output || a.h2.cols() != params.shape().hidden2)
        throw DimensionError("mlp_backward: activations do not match the model");

    MlpParams grads(params.shape());
    const double inv_batch = 1.0 / static_cast<double>(batch);

    Matrix d3 = a.probs;
    for (std::size_t r = 0; r < batch; ++r) {
        const int target = targets[r];
        if (target < 0 || target >= static_cast<int>(MlpShape::output)) throw DimensionError("target out of range");
        d3(r, static_cast<std::size_t>(target)) -= 1.0;
        for (double& v : d3.row(r)) v *= inv_batch;
    }

    Matrix dh2;
    dense_backward(a.h2, params.tensor(4), d3, grads.tensor(4), grads.tensor(5), &dh2);
    for (std::size_t i = 0; i < dh2.data().size(); ++i)
        dh2.data()[i] *= a.z2.data()[i] > 0.0 ? a.mask2.data()[i] : 0.0;

    Matrix dh1;
    dense_backward(a.h1, params.tensor(2), dh2, grads.tensor(2), grads.tensor(3), &dh1);
    for (std::size_t i = 0; i < dh1.data().size(); ++i)
        dh1.data()[i] *= a.z1.data()[i] > 0.0 ? a.mask1.data()[i] : 0.0;

    dense_backward(a.input, params.tensor(0), dh1, grads.tensor(0), grads.tensor(1), nullptr);

    if (weight_decay != 0.0) {
        for (std::size_t t = 0; t < MlpParams::kTensors; t += 2) {
            auto g = grads.tensor(t);
            const auto w = params.tensor(t);
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += weight_decay * w[i];
        }
    }
    return {grads.values().begin(), grads.values().end()};
}

double mlp_loss(const MlpParams& params, const Matrix& x, std::span<const int> targets) {
    Rng unused(0);
    const auto a = mlp_forward(params, x, false, 0.0, unused);
    double total = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const auto z = a.logits.row(r);
        const double mx = *std::max_element(z.begin(), z.end());
        double sum = 0.0;
        for (const double v : z) sum += std::exp(v - mx);
        total += mx + std::log(sum) - z[static_cast<std::size_t>(targets[r])];
    }
    return total / static_cast<double>(x.rows());
}

}  // namespace rumour
