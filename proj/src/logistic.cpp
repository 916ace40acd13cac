#include "hedgefit/logistic.hpp"

#include <atomic>
#include <cmath>
#include <iostream>

#include "hedgefit/errors.hpp"

namespace hedgefit {

namespace {

std::atomic<std::uint64_t> clamp_count{0};

// exp with argument clamped to +-700; unguarded exp overflows past ~709 and
// a transient excursion during early exploration must not abort the run.
double guarded_exp(double arg) {
    if (arg > 700.0 || arg < -700.0) {
        if (clamp_count.fetch_add(1) == 0)
            std::cerr << "warning: exp argument " << arg
                      << " clamped to +-700 in logistic model\n";
        arg = arg > 0.0 ? 700.0 : -700.0;
    }
    return std::exp(arg);
}

double predict_impl(double n0, double ne, double r, double t) {
    const double decay = guarded_exp(-r * t);
    const double denom = n0 + (ne - n0) * decay;
    if (denom == 0.0 || !std::isfinite(denom)) {
        throw EvalFault("logistic denominator degenerate", {n0, ne, r});
    }
    return n0 * ne / denom;
}

}  // namespace

double logistic_predict(const LogisticParams& params, double t) {
    const double v = predict_impl(params.n0, params.ne, params.r, t);
    if (!std::isfinite(v))
        throw EvalFault("non-finite logistic prediction",
                        {params.n0, params.ne, params.r});
    return v;
}

std::uint64_t logistic_clamp_count() { return clamp_count.load(); }

ModelSpec make_logistic_model() {
    auto predict = [](const ParamVector& theta, const std::vector<double>& x) {
        return predict_impl(theta[0], theta[1], theta[2], x[0]);
    };
    // Closed-form partials of N(t) = N0*Ne / (N0 + (Ne-N0)*E), E = exp(-r t):
    //   dN/dN0 = Ne^2 * E / D^2
    //   dN/dNe = N0^2 * (1-E) / D^2
    //   dN/dr  = N0*Ne*(Ne-N0) * t * E / D^2
    auto predict_grad = [](const ParamVector& theta,
                           const std::vector<double>& x) {
        const double n0 = theta[0], ne = theta[1], r = theta[2], t = x[0];
        const double decay = guarded_exp(-r * t);
        const double denom = n0 + (ne - n0) * decay;
        if (denom == 0.0 || !std::isfinite(denom))
            throw EvalFault("logistic denominator degenerate", theta.values());
        const double inv_d2 = 1.0 / (denom * denom);
        return std::vector<double>{
            ne * ne * decay * inv_d2,
            n0 * n0 * (1.0 - decay) * inv_d2,
            n0 * ne * (ne - n0) * t * decay * inv_d2};
    };
    auto loss = [](double pred, double y) {
        const double e = pred - y;
        return e * e;
    };
    auto loss_deriv = [](double pred, double y) { return 2.0 * (pred - y); };

    // N0, Ne >= 1e-9 keeps the denominator away from the singular set.
    const double inf = std::numeric_limits<double>::infinity();
    BoxBounds bounds{{1e-9, 1e-9, -inf}, {inf, inf, inf}};

    return ModelSpec(3, predict, predict_grad, loss, loss_deriv, bounds);
}

}  // namespace hedgefit
