#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace rumour {

struct AdamState {
    static constexpr double beta1 = 0.9;
    static constexpr double beta2 = 0.999;
    static constexpr double epsilon = 1e-8;

    std::vector<double> first_moment;
    std::vector<double> second_moment;
    std::uint64_t step_count = 0;

    AdamState() = default;
    explicit AdamState(std::size_t n) : first_moment(n, 0.0), second_moment(n, 0.0) {}
};

/// One bias-corrected Adam update, in place. Throws DimensionError on a shape mismatch.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, double lr);

}  // namespace rumour
