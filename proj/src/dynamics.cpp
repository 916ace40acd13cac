#include "hedgefit/dynamics.hpp"

#include <cmath>

#include "hedgefit/errors.hpp"

namespace hedgefit {

double NoiseSchedule::sigma(double tau) const {
    return epsilon / std::sqrt(std::log(tau + 2.0));
}

ExpertState::ExpertState(std::size_t id, ParamVector theta0,
                         std::uint64_t run_seed)
    : id(id), theta(std::move(theta0)), noise(run_seed, id + 1) {}

std::vector<double> gaussian_increment(ExpertState& state, double delta,
                                       std::size_t p) {
    if (delta <= 0.0) throw ConfigError("time step must be positive");
    return state.noise.normal_vector(p, std::sqrt(delta));
}

namespace {

// theta' = base - delta * grad J(base) + sigma(tau_{n+1}) * dW, projected.
// With epsilon = 0 the noise stream is left untouched so the trajectory is
// bit-identical to plain gradient descent.
void step_from(const ParamVector& base, ExpertState& state,
               const ModelSpec& model, DataView subsample, const TimeGrid& grid,
               const NoiseSchedule& schedule, std::size_t n) {
    if (n >= grid.steps)
        throw ConfigError("step index out of grid range");
    const double delta = grid.delta();
    try {
        const auto grad = analytic_gradient(model, base, subsample);
        ParamVector next = base;
        for (std::size_t j = 0; j < next.size(); ++j)
            next[j] = base[j] - delta * grad[j];
        if (schedule.epsilon != 0.0) {
            const double scale = schedule.sigma(grid.tau(n + 1));
            const auto dw = gaussian_increment(state, delta, next.size());
            for (std::size_t j = 0; j < next.size(); ++j)
                next[j] += scale * dw[j];
        }
        if (model.bounds()) model.bounds()->project(next);
        state.theta = next;
    } catch (EvalFault& fault) {
        fault.expert_id = static_cast<long>(state.id);
        fault.step = static_cast<long>(n);
        throw;
    }
}

}  // namespace

void expert_step(ExpertState& state, const ModelSpec& model, DataView subsample,
                 const TimeGrid& grid, const NoiseSchedule& schedule,
                 std::size_t n) {
    step_from(state.theta, state, model, subsample, grid, schedule, n);
}

void consensus_step(const ParamVector& consensus, ExpertState& state,
                    const ModelSpec& model, DataView subsample,
                    const TimeGrid& grid, const NoiseSchedule& schedule,
                    std::size_t n) {
    step_from(consensus, state, model, subsample, grid, schedule, n);
}

}  // namespace hedgefit
