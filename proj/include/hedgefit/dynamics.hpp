#pragma once

#include <cstdint>
#include <vector>

#include "hedgefit/dataset.hpp"
#include "hedgefit/model.hpp"
#include "hedgefit/rng.hpp"

namespace hedgefit {

// Equidistant discretization of [0, T] into N steps of width delta = T/N.
struct TimeGrid {
    double horizon;     // T
    std::size_t steps;  // N

    double delta() const { return horizon / static_cast<double>(steps); }
    double tau(std::size_t n) const {
        return static_cast<double>(n) * delta();
    }
};

// Annealed noise amplitude sigma(tau) = epsilon / sqrt(log(tau + 2)),
// strictly decreasing in tau.
struct NoiseSchedule {
    double epsilon;

    double sigma(double tau) const;
};

// One expert: its parameter estimate plus its private noise stream.
struct ExpertState {
    std::size_t id;
    ParamVector theta;
    NoiseStream noise;

    ExpertState(std::size_t id, ParamVector theta0, std::uint64_t run_seed);
};

// p independent Gaussian increments with mean 0 and variance delta, drawn
// from the expert's own stream.
std::vector<double> gaussian_increment(ExpertState& state, double delta,
                                       std::size_t p);

// One Euler-Maruyama step from the expert's own estimate:
//   theta' = theta - delta * grad J_k(theta) + sigma(tau_{n+1}) * dW.
// With epsilon = 0 this is plain gradient descent and the noise stream is
// never touched. Box bounds are applied after the noise addition.
void expert_step(ExpertState& state, const ModelSpec& model, DataView subsample,
                 const TimeGrid& grid, const NoiseSchedule& schedule,
                 std::size_t n);

// Same step but based at the shared consensus estimate (both the start point
// and the gradient argument).
void consensus_step(const ParamVector& consensus, ExpertState& state,
                    const ModelSpec& model, DataView subsample,
                    const TimeGrid& grid, const NoiseSchedule& schedule,
                    std::size_t n);

}  // namespace hedgefit
