#include "reclab/weight.hpp"

#include <cmath>
#include <utility>

#include "reclab/error.hpp"

namespace reclab {

WeightFunction::WeightFunction(std::string label, std::function<double(double)> evaluator,
                               double M, double omega)
    : label_(std::move(label)), evaluator_(std::move(evaluator)), M_(M), omega_(omega) {
    if (!evaluator_) throw Error(ErrorKind::Structural, "weight without evaluator");
    if (!(M_ >= 1.0)) throw Error(ErrorKind::InvalidWeight, "admissibility constant M must be >= 1");
    if (!std::isfinite(omega_)) throw Error(ErrorKind::InvalidWeight, "omega must be finite");
}

double WeightFunction::operator()(double x) const {
    double v = evaluator_(x);
    if (!(v > 0.0) || std::isnan(v)) {
        throw Error(ErrorKind::InvalidWeight,
                    label_ + " is not positive at x=" + std::to_string(x));
    }
    return v;
}

WeightFunction WeightFunction::with_constants(double M, double omega) const {
    return {label_, evaluator_, M, omega};
}

WeightFunction WeightFunction::scaled(std::string label, std::function<double(double)> factor) const {
    auto base = evaluator_;
    return {std::move(label), [base, factor](double x) { return base(x) * factor(x); }, M_, omega_};
}

namespace weights {

namespace {

double param(const ParamMap& params, const std::string& key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

} // namespace

WeightFunction flat() {
    return {"flat", [](double) { return 1.0; }, 1.0, 0.0};
}

WeightFunction exp_decay(double rate) {
    return {"exp_decay", [rate](double x) { return std::exp(-rate * x); }, 1.0, std::abs(rate)};
}

WeightFunction exp_growth(double rate) {
    return {"exp_growth", [rate](double x) { return std::exp(rate * x); }, 1.0, std::abs(rate)};
}

WeightFunction symmetric_exp(double rate) {
    return {"symmetric_exp", [rate](double x) { return std::exp(-rate * std::abs(x)); }, 1.0,
            std::abs(rate)};
}

WeightFunction one_sided_exp(double rate) {
    return {"one_sided_exp", [rate](double x) { return std::exp(-rate * std::max(x, 0.0)); }, 1.0,
            std::abs(rate)};
}

WeightFunction gaussian(double M, double omega) {
    return {"gaussian", [](double x) { return std::exp(-x * x); }, M, omega};
}

WeightFunction oscillating_decay() {
    // rho(t)/rho(t+s) <= 3 e^{s}, so (M, omega) = (3, 1).
    return {"oscillating_decay", [](double x) { return (2.0 + std::sin(x)) * std::exp(-x); }, 3.0,
            1.0};
}

WeightFunction inverse_power(double power) {
    return {"inverse_power", [power](double x) { return std::pow(1.0 + x, -power); }, 1.0, power};
}

WeightFunction rational_hump() {
    // Written as 1/(x + 1/x) so huge arguments underflow to 0 instead of inf/inf.
    return {"rational_hump", [](double x) { return 1.0 / (x + 1.0 / x); }, 1.0, 1.0};
}

WeightFunction make(const std::string& name, const ParamMap& params) {
    const double rate = param(params, "rate", 1.0);
    if (name == "flat") return flat();
    if (name == "exp_decay") return exp_decay(rate);
    if (name == "exp_growth") return exp_growth(rate);
    if (name == "symmetric_exp") return symmetric_exp(rate);
    if (name == "one_sided_exp") return one_sided_exp(rate);
    if (name == "gaussian") return gaussian(param(params, "M", 1.0), param(params, "omega", 1.0));
    if (name == "oscillating_decay") return oscillating_decay();
    if (name == "inverse_power") return inverse_power(param(params, "power", 3.0));
    if (name == "rational_hump") return rational_hump();
    throw Error(ErrorKind::Validation, "unknown weight name '" + name + "'");
}

std::vector<std::string> names() {
    return {"flat",     "exp_decay",         "exp_growth",    "symmetric_exp", "one_sided_exp",
            "gaussian", "oscillating_decay", "inverse_power", "rational_hump"};
}

} // namespace weights

} // namespace reclab
