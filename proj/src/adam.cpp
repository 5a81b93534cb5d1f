#include "rumour/adam.hpp"

#include <cmath>

#include "rumour/error.hpp"

namespace rumour {

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, double lr) {
    if (grads.size() != params.size() || state.first_moment.size() != params.size() ||
        state.second_moment.size() != params.size())
        throw DimensionError("adam_step: parameter, gradient and moment sizes differ");

    ++state.step_count;
    const double t = static_cast<double>(state.step_count);
    const double correction1 = 1.0 - std::pow(AdamState::beta1, t);
    const double correction2 = 1.0 - std::pow(AdamState::beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        double& m = state.first_moment[i];
        double& v = state.second_moment[i];
        m = AdamState::beta1 * m + (1.0 - AdamState::beta1) * g;
        v = AdamState::beta2 * v + (1.0 - AdamState::beta2) * g * g;
        const double m_hat = m / correction1;
        const double v_hat = v / correction2;
        params[i] -= lr * m_hat / (std::sqrt(v_hat) + AdamState::epsilon);
    }
}

}  // namespace rumour
