#pragma once

#include <cstdint>

#include "hedgefit/model.hpp"

namespace hedgefit {

// Logistic growth law N(t) = N0*Ne / (N0 + (Ne - N0) * exp(-r*t)).
struct LogisticParams {
    double n0;  // initial population
    double ne;  // equilibrium population
    double r;   // growth rate, 1/day
};

double logistic_predict(const LogisticParams& params, double t);

// Logistic model with quadratic loss and box bounds keeping N0, Ne >= 1e-9.
ModelSpec make_logistic_model();

// Number of times the exp argument guard (|arg| > 700) has fired.
std::uint64_t logistic_clamp_count();

}  // namespace hedgefit
