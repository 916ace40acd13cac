#include "hedgefit/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "hedgefit/errors.hpp"
#include "hedgefit/logistic.hpp"

namespace hedgefit {

ParamVector::ParamVector(std::vector<double> values)
    : values_(std::move(values)) {
    if (values_.empty()) throw ConfigError("parameter vector must be non-empty");
    for (double v : values_) {
        if (!std::isfinite(v))
            throw EvalFault("non-finite parameter entry", values_);
    }
}

void BoxBounds::project(ParamVector& theta) const {
    for (std::size_t i = 0; i < theta.size(); ++i)
        theta[i] = std::clamp(theta[i], lo[i], hi[i]);
}

ModelSpec::ModelSpec(std::size_t p, PredictFn predict,
                     PredictGradFn predict_grad, LossFn loss, LossFn loss_deriv,
                     std::optional<BoxBounds> bounds)
    : p_(p),
      predict_(std::move(predict)),
      predict_grad_(std::move(predict_grad)),
      loss_(std::move(loss)),
      loss_deriv_(std::move(loss_deriv)),
      bounds_(std::move(bounds)) {
    if (p_ == 0) throw ConfigError("model dimension must be positive");
    if (bounds_ && (bounds_->lo.size() != p_ || bounds_->hi.size() != p_))
        throw ConfigError("box bounds dimension mismatch");
}

double ModelSpec::predict(const ParamVector& theta,
                          const std::vector<double>& x) const {
    const double v = predict_(theta, x);
    if (!std::isfinite(v))
        throw EvalFault("non-finite prediction", theta.values());
    return v;
}

std::vector<double> ModelSpec::predict_grad(const ParamVector& theta,
                                            const std::vector<double>& x) const {
    auto g = predict_grad_(theta, x);
    if (g.size() != p_)
        throw EvalFault("prediction gradient has wrong dimension",
                        theta.values());
    for (double v : g) {
        if (!std::isfinite(v))
            throw EvalFault("non-finite prediction gradient", theta.values());
    }
    return g;
}

double objective(const ModelSpec& model, const ParamVector& theta,
                 DataView data) {
    if (data.size() == 0) throw DataError("objective over empty subsample");
    if (theta.size() != model.dim())
        throw ConfigError("theta dimension does not match model");
    double sum = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto& pt = data[i];
        sum += model.loss(model.predict(theta, pt.x), pt.y);
    }
    const double value = sum / static_cast<double>(data.size());
    if (!std::isfinite(value))
        throw EvalFault("non-finite objective", theta.values());
    return value;
}

std::vector<double> analytic_gradient(const ModelSpec& model,
                                      const ParamVector& theta, DataView data) {
    if (data.size() == 0) throw DataError("gradient over empty subsample");
    std::vector<double> grad(model.dim(), 0.0);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto& pt = data[i];
        const double pred = model.predict(theta, pt.x);
        const double dl = model.loss_deriv(pred, pt.y);
        const auto dp = model.predict_grad(theta, pt.x);
        for (std::size_t j = 0; j < grad.size(); ++j) grad[j] += dl * dp[j];
    }
    const double inv_m = 1.0 / static_cast<double>(data.size());
    for (auto& g : grad) {
        g *= inv_m;
        if (!std::isfinite(g))
            throw EvalFault("non-finite gradient component", theta.values());
    }
    return grad;
}

std::vector<double> finite_difference_gradient(const ModelSpec& model,
                                               const ParamVector& theta,
                                               DataView data, double step) {
    if (step <= 0.0) throw ConfigError("finite-difference step must be positive");
    std::vector<double> grad(theta.size());
    for (std::size_t j = 0; j < theta.size(); ++j) {
        ParamVector lo = theta;
        ParamVector hi = theta;
        lo[j] -= step;
        hi[j] += step;
        grad[j] = (objective(model, hi, data) - objective(model, lo, data)) /
                  (2.0 * step);
    }
    return grad;
}

namespace {
std::map<std::string, std::function<ModelSpec()>>& model_registry() {
    static std::map<std::string, std::function<ModelSpec()>> registry = {
        {"logistic", [] { return make_logistic_model(); }}};
    return registry;
}
std::mutex registry_mutex;
}  // namespace

ModelSpec make_model(const std::string& name) {
    std::lock_guard lock(registry_mutex);
    auto it = model_registry().find(name);
    if (it == model_registry().end())
        throw ConfigError("unknown model '" + name + "'");
    return it->second();
}

void register_model(const std::string& name,
                    std::function<ModelSpec()> factory) {
    std::lock_guard lock(registry_mutex);
    model_registry()[name] = std::move(factory);
}

}  // namespace hedgefit
