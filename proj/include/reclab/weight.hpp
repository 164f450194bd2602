#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace reclab {

using ParamMap = std::map<std::string, double>;

/// Positive weight rho on a one-dimensional domain together with the
/// admissibility constants (M, omega) it claims. The claim is certified by
/// check_weight_admissible, never assumed.
class WeightFunction {
public:
    WeightFunction(std::string label, std::function<double(double)> evaluator, double M,
                   double omega);

    /// Throws ErrorKind::InvalidWeight on a non-positive or non-finite value.
    double operator()(double x) const;
    /// Raw evaluation, no positivity check.
    double eval_unchecked(double x) const { return evaluator_(x); }

    double M() const { return M_; }
    double omega() const { return omega_; }
    const std::string& label() const { return label_; }

    WeightFunction with_constants(double M, double omega) const;
    /// Pointwise product by a positive factor; used for monotonicity checks.
    WeightFunction scaled(std::string label, std::function<double(double)> factor) const;

private:
    std::string label_;
    std::function<double(double)> evaluator_;
    double M_;
    double omega_;
};

namespace weights {

WeightFunction flat();
/// e^{-rate x}; admissible with M = 1, omega = rate.
WeightFunction exp_decay(double rate = 1.0);
/// e^{rate x}.
WeightFunction exp_growth(double rate = 1.0);
/// e^{-rate |x|}.
WeightFunction symmetric_exp(double rate = 1.0);
/// e^{-rate max(x, 0)}: flat on the left, decaying on the right.
WeightFunction one_sided_exp(double rate = 1.0);
/// e^{-x^2}; claims (M, omega) but is not admissible for any.
WeightFunction gaussian(double M = 1.0, double omega = 1.0);
/// (2 + sin x) e^{-x}.
WeightFunction oscillating_decay();
/// 1 / (1 + x)^power on (0, inf).
WeightFunction inverse_power(double power);
/// x / (1 + x^2) on (0, inf).
WeightFunction rational_hump();

/// Named lookup used by configuration files. Throws ErrorKind::Validation
/// for unknown names.
WeightFunction make(const std::string& name, const ParamMap& params);
std::vector<std::string> names();

} // namespace weights

} // namespace reclab
