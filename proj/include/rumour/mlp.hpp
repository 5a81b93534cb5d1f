#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "rumour/matrix.hpp"
#include "rumour/rng.hpp"

namespace rumour {

/// input -> hidden1 (ReLU) -> hidden2 (ReLU) -> 2-way softmax.
struct MlpShape {
    std::size_t input = 0;
    std::size_t hidden1 = 256;
    std::size_t hidden2 = 64;
    static constexpr std::size_t output = 2;

    bool operator==(const MlpShape&) const = default;
};

/// All weights and biases in one flat buffer so a single optimiser state covers them.
///
/// Tensor order: W1, b1, W2, b2, W3, b3. Weight matrices are stored
/// [fan_in][fan_out] row-major, i.e. W(i, o) connects input unit i to output unit o.
class MlpParams {
public:
    static constexpr std::size_t kTensors = 6;

    MlpParams() = default;
    explicit MlpParams(const MlpShape& shape);

    /// He-normal hidden weights, Glorot-normal output weights, zero biases.
    static MlpParams initialise(const MlpShape& shape, Rng& rng);

    const MlpShape& shape() const { return shape_; }
    std::size_t size() const { return values_.size(); }
    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    std::span<double> tensor(std::size_t t);
    std::span<const double> tensor(std::size_t t) const;
    /// Rows and columns of tensor t (biases are 1 x n).
    std::pair<std::size_t, std::size_t> tensor_shape(std::size_t t) const;
    static bool is_weight(std::size_t t) { return t % 2 == 0; }
    static std::string_view tensor_name(std::size_t t);

    /// Sum of squares of the weight matrices (biases excluded).
    double weight_sq_norm() const;

    bool operator==(const MlpParams&) const = default;

private:
    MlpShape shape_;
    std::vector<double> values_;
    std::array<std::size_t, kTensors + 1> offsets_{};
};

struct MlpActivations {
    Matrix input;
    Matrix z1, h1, mask1;  // h1 = relu(z1) * mask1
    Matrix z2, h2, mask2;
    Matrix logits;
    Matrix probs;  // column 1 = non_rumour
};

/// Inverted dropout: zero each entry with probability p, scale survivors by 1/(1-p).
/// Writes the applied multipliers to `mask`. p == 0 leaves values and the generator untouched.
void apply_dropout(std::span<double> values, std::span<double> mask, double p, Rng& rng);

/// Row-wise numerically stable softmax.
void softmax_rows(const Matrix& logits, Matrix& probs);

/// Forward pass. In training mode dropout masks are drawn from `rng` for both hidden layers;
/// in evaluation mode activations pass through unchanged.
MlpActivations mlp_forward(const MlpParams& params, const Matrix& x, bool training, double dropout_p, Rng& rng);
MlpActivations mlp_forward(const MlpParams& params, const Matrix& x, bool training, double dropout_p,
                           std::uint64_t seed);

/// Gradient of the mean cross-entropy over the batch w.r.t. every parameter,
/// plus weight_decay * W on weight tensors. `targets` holds class indices (1 = non_rumour).
std::vector<double> mlp_backward(const MlpParams& params, const MlpActivations& acts, std::span<const int> targets,
                                 double weight_decay);

/// Mean cross-entropy of an evaluation-mode forward pass.
double mlp_loss(const MlpParams& params, const Matrix& x, std::span<const int> targets);

}  // namespace rumour
