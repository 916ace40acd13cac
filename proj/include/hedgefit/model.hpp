#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hedgefit/dataset.hpp"

namespace hedgefit {

// Parameter vector of fixed dimension p with finite entries.
class ParamVector {
public:
    explicit ParamVector(std::vector<double> values);

    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }
    const std::vector<double>& values() const { return values_; }

    friend bool operator==(const ParamVector& a, const ParamVector& b) {
        return a.values_ == b.values_;
    }

private:
    std::vector<double> values_;
};

// Optional per-coordinate box constraints; +-inf entries mean unbounded.
struct BoxBounds {
    std::vector<double> lo;
    std::vector<double> hi;

    static BoxBounds unbounded(std::size_t p) {
        const double inf = std::numeric_limits<double>::infinity();
        return {std::vector<double>(p, -inf), std::vector<double>(p, inf)};
    }
    void project(ParamVector& theta) const;
};

// Hypothesis + loss bundle: predict h_theta(x), per-point loss l(pred, y) with
// its derivative in the prediction, and the prediction's parameter gradient.
class ModelSpec {
public:
    using PredictFn =
        std::function<double(const ParamVector&, const std::vector<double>&)>;
    using PredictGradFn = std::function<std::vector<double>(
        const ParamVector&, const std::vector<double>&)>;
    using LossFn = std::function<double(double, double)>;

    ModelSpec(std::size_t p, PredictFn predict, PredictGradFn predict_grad,
              LossFn loss, LossFn loss_deriv,
              std::optional<BoxBounds> bounds = std::nullopt);

    std::size_t dim() const { return p_; }
    double predict(const ParamVector& theta, const std::vector<double>& x) const;
    std::vector<double> predict_grad(const ParamVector& theta,
                                     const std::vector<double>& x) const;
    double loss(double prediction, double target) const {
        return loss_(prediction, target);
    }
    double loss_deriv(double prediction, double target) const {
        return loss_deriv_(prediction, target);
    }
    const std::optional<BoxBounds>& bounds() const { return bounds_; }

private:
    std::size_t p_;
    PredictFn predict_;
    PredictGradFn predict_grad_;
    LossFn loss_;
    LossFn loss_deriv_;
    std::optional<BoxBounds> bounds_;
};

// Mean loss over a subsample.
double objective(const ModelSpec& model, const ParamVector& theta,
                 DataView data);

// Gradient of the mean loss via the chain rule through predict_grad.
std::vector<double> analytic_gradient(const ModelSpec& model,
                                      const ParamVector& theta, DataView data);

// Central-difference approximation of the same gradient; verification oracle.
std::vector<double> finite_difference_gradient(const ModelSpec& model,
                                               const ParamVector& theta,
                                               DataView data, double step);

// Model lookup by name ("logistic" ships built in); custom models register
// through the library API.
ModelSpec make_model(const std::string& name);
void register_model(const std::string& name,
                    std::function<ModelSpec()> factory);

}  // namespace hedgefit
