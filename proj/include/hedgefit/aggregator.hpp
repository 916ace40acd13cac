#pragma once

#include <cstdint>
#include <vector>

#include "hedgefit/dataset.hpp"
#include "hedgefit/dynamics.hpp"
#include "hedgefit/model.hpp"

namespace hedgefit {

struct BoundReport {
    double bound = 0.0;       // -log(sum w_N) / (1 - beta)
    double total_loss = 0.0;  // L
    double slack = 0.0;       // bound - L
    bool satisfied = false;
};

// Multiplicative-weights state over K experts. Weights live in log space
// (each update adds r * log(beta)), so decay over 1e5 steps cannot underflow;
// sum w is recovered as logsumexp(log w). Every update asserts the stepwise
// contraction  sum w_{n+1} <= sum w_n * (1 - (1-beta) * L_n).
class MixingState {
public:
    MixingState(std::size_t experts, double beta, double gamma);
    MixingState(const std::vector<double>& omega0, double beta, double gamma);

    std::size_t experts() const { return log_weights_.size(); }
    double beta() const { return beta_; }
    double gamma() const { return gamma_; }

    // Current mixing distribution pi = w / sum w (max-shifted normalization).
    std::vector<double> mixing() const;

    // Current weights in plain space (may underflow after many steps;
    // log_weights() is the authoritative representation).
    std::vector<double> weights() const;
    const std::vector<double>& log_weights() const { return log_weights_; }
    double log_weight_sum() const;

    // Record risks r_n(k) for the current step and apply w *= beta^r.
    // Rejects any risk outside [0, 1).
    void update(const std::vector<double>& risks);

    std::size_t steps() const { return step_losses_.size(); }
    double total_loss() const { return total_loss_; }
    const std::vector<double>& step_losses() const { return step_losses_; }
    const std::vector<std::vector<double>>& risk_history() const {
        return risk_history_;
    }

    // Worst (most negative) slack seen in the stepwise contraction check,
    // in log space.
    double worst_contraction_slack() const { return worst_contraction_slack_; }

    BoundReport bound_report() const;

private:
    std::vector<double> log_weights_;
    double beta_;
    double gamma_;
    double total_loss_ = 0.0;
    std::vector<double> step_losses_;
    std::vector<std::vector<double>> risk_history_;
    double worst_contraction_slack_ = 0.0;

    friend struct MixingStateAccess;
};

// r = 1 - exp(-gamma * J(theta, validation)), in [0, 1).
double risk_measure(const ParamVector& theta, const ModelSpec& model,
                    DataView validation, double gamma);

// pi(k) = w(k) / sum w; rejects an all-zero weight vector.
std::vector<double> mixing_distribution(const std::vector<double>& weights);

// Weighted average of expert estimates under simplex weights pi.
ParamVector consensus(const std::vector<ExpertState>& states,
                      const std::vector<double>& pi);

// L_n = sum_k pi(k) r(k).
double mixture_loss(const std::vector<double>& pi,
                    const std::vector<double>& risks);

// L = sum_n L_n.
double total_loss(const std::vector<double>& step_losses);

// Check L <= -log(sum w_N)/(1-beta), in log space with 1e-9 absolute
// tolerance on the slack. Requires the run to have started from weights
// summing to one.
BoundReport hedge_bound_check(double total_loss, double log_weight_sum,
                              double beta);

}  // namespace hedgefit
