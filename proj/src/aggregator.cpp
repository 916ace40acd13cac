#include "hedgefit/aggregator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hedgefit/errors.hpp"

namespace hedgefit {

namespace {

double logsumexp(const std::vector<double>& v) {
    const double top = *std::max_element(v.begin(), v.end());
    if (!std::isfinite(top)) return top;
    double sum = 0.0;
    for (double x : v) sum += std::exp(x - top);
    return top + std::log(sum);
}

void check_risks(const std::vector<double>& risks) {
    for (double r : risks) {
        if (!(r >= 0.0 && r < 1.0))
            throw ConfigError("risk " + std::to_string(r) +
                              " outside [0, 1)");
    }
}

}  // namespace

MixingState::MixingState(std::size_t experts, double beta, double gamma)
    : beta_(beta), gamma_(gamma) {
    if (experts == 0) throw ConfigError("need at least one expert");
    if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("beta must be in (0,1)");
    if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
    log_weights_.assign(experts,
                        -std::log(static_cast<double>(experts)));
}

MixingState::MixingState(const std::vector<double>& omega0, double beta,
                         double gamma)
    : MixingState(omega0.size(), beta, gamma) {
    double sum = 0.0;
    for (double w : omega0) {
        if (w < 0.0) throw ConfigError("initial weights must be nonnegative");
        sum += w;
    }
    // The bound chain starts from sum w_0 = 1.
    if (std::abs(sum - 1.0) > 1e-9)
        throw ConfigError("initial weights must sum to one");
    // log(0) = -inf is allowed: a zero initial weight keeps that expert out
    // of the mixture permanently.
    for (std::size_t k = 0; k < omega0.size(); ++k)
        log_weights_[k] = std::log(omega0[k]);
}

std::vector<double> MixingState::mixing() const {
    const double top =
        *std::max_element(log_weights_.begin(), log_weights_.end());
    std::vector<double> pi(log_weights_.size());
    double sum = 0.0;
    for (std::size_t k = 0; k < pi.size(); ++k) {
        pi[k] = std::exp(log_weights_[k] - top);
        sum += pi[k];
    }
    for (auto& p : pi) p /= sum;
    return pi;
}

std::vector<double> MixingState::weights() const {
    std::vector<double> w(log_weights_.size());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = std::exp(log_weights_[k]);
    return w;
}

double MixingState::log_weight_sum() const { return logsumexp(log_weights_); }

void MixingState::update(const std::vector<double>& risks) {
    if (risks.size() != log_weights_.size())
        throw ConfigError("risk vector size does not match expert count");
    check_risks(risks);

    const auto pi = mixing();
    const double step_loss = mixture_loss(pi, risks);
    const double before = log_weight_sum();

    const double log_beta = std::log(beta_);
    for (std::size_t k = 0; k < log_weights_.size(); ++k)
        log_weights_[k] += risks[k] * log_beta;

    // Stepwise contraction: sum w_{n+1} <= sum w_n * (1 - (1-beta) * L_n).
    const double after = log_weight_sum();
    const double cap = before + std::log1p(-(1.0 - beta_) * step_loss);
    const double slack = cap - after;
    worst_contraction_slack_ = std::min(worst_contraction_slack_, slack);
    if (slack < -1e-12 * std::max(1.0, std::abs(cap)))
        throw EvalFault("stepwise weight contraction violated");

    risk_history_.push_back(risks);
    step_losses_.push_back(step_loss);
    total_loss_ += step_loss;
}

BoundReport MixingState::bound_report() const {
    return hedge_bound_check(total_loss_, log_weight_sum(), beta_);
}

double risk_measure(const ParamVector& theta, const ModelSpec& model,
                    DataView validation, double gamma) {
    if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
    const double obj = objective(model, theta, validation);
    double r = -std::expm1(-gamma * obj);
    if (r >= 1.0) r = std::nextafter(1.0, 0.0);  // exp underflow guard
    if (r < 0.0) r = 0.0;
    return r;
}

std::vector<double> mixing_distribution(const std::vector<double>& weights) {
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw ConfigError("negative weight");
        sum += w;
    }
    if (sum <= 0.0) throw ConfigError("degenerate all-zero weight vector");
    std::vector<double> pi(weights.size());
    for (std::size_t k = 0; k < pi.size(); ++k) pi[k] = weights[k] / sum;
    return pi;
}

ParamVector consensus(const std::vector<ExpertState>& states,
                      const std::vector<double>& pi) {
    if (states.empty() || states.size() != pi.size())
        throw ConfigError("expert/weight count mismatch in consensus");
    const std::size_t p = states.front().theta.size();
    std::vector<double> avg(p, 0.0);
    for (std::size_t k = 0; k < states.size(); ++k) {
        if (states[k].theta.size() != p)
            throw ConfigError("expert parameter dimension mismatch");
        for (std::size_t j = 0; j < p; ++j)
            avg[j] += pi[k] * states[k].theta[j];
    }
    return ParamVector(std::move(avg));
}

double mixture_loss(const std::vector<double>& pi,
                    const std::vector<double>& risks) {
    if (pi.size() != risks.size())
        throw ConfigError("pi/risk size mismatch");
    check_risks(risks);
    return std::inner_product(pi.begin(), pi.end(), risks.begin(), 0.0);
}

double total_loss(const std::vector<double>& step_losses) {
    return std::accumulate(step_losses.begin(), step_losses.end(), 0.0);
}

BoundReport hedge_bound_check(double total_loss, double log_weight_sum,
                              double beta) {
    BoundReport report;
    report.total_loss = total_loss;
    report.bound = -log_weight_sum / (1.0 - beta);
    report.slack = report.bound - total_loss;
    report.satisfied = report.slack >= -1e-9;
    return report;
}

}  // namespace hedgefit
