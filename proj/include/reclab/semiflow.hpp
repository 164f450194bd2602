#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>

#include "reclab/domain.hpp"
#include "reclab/weight.hpp"

namespace reclab {

/// Closed-form semiflow phi(t, x) on a one-dimensional domain.
class Semiflow {
public:
    using Map = std::function<double(double, double)>;
    using Inverse = std::function<std::optional<double>(double, double)>;
    using Indicator = std::function<bool(double, double)>;

    struct Parts {
        std::string name;
        DomainSpec domain = DomainSpec::half_line();
        Map forward;
        Inverse inverse_on_image;
        Map jac_det;
        Indicator image_indicator;
        bool group_like = false;
        /// forward(n t0, .) is available exactly, so iterates never compound
        /// interpolation error.
        bool closed_form = true;
    };

    explicit Semiflow(Parts parts);

    /// phi(t, x). Negative t requires a group-like flow.
    double forward(double t, double x) const;
    /// phi(t, .)^{-1}(y) when y lies in the image of phi(t, .).
    std::optional<double> inverse_on_image(double t, double y) const;
    double jac_det(double t, double x) const;
    bool in_image(double t, double y) const;

    /// phi(-t, x): the group flow backwards, or the inverse on the image
    /// for a semiflow. Empty when undefined.
    std::optional<double> backward(double t, double x) const;
    std::optional<double> backward_jac_det(double t, double x) const;

    const std::string& name() const { return parts_.name; }
    const DomainSpec& domain() const { return parts_.domain; }
    bool group_like() const { return parts_.group_like; }
    bool closed_form() const { return parts_.closed_form; }

    /// phi(-t, .) as a semiflow; requires a group-like flow.
    Semiflow reversed() const;

private:
    Parts parts_;
};

namespace semiflows {

/// x + t on the given domain. Group-like exactly when the domain is a line.
Semiflow translation(const DomainSpec& domain);
/// x - t on a line.
Semiflow backward_translation(const DomainSpec& domain);
/// x e^{rate t} on (0, inf).
Semiflow dilation(const DomainSpec& domain, double rate = 1.0);
/// Flow of x' = a x + b on the line.
Semiflow affine(const DomainSpec& domain, double a, double b);

Semiflow make(const std::string& name, const ParamMap& params, const DomainSpec& domain);
std::vector<std::string> names();

} // namespace semiflows

struct SemiflowSelfCheck {
    double identity_residual = 0.0;   // max |phi(0,x) - x|
    double cocycle_residual = 0.0;    // max relative |phi(t+s,x) - phi(t,phi(s,x))|
    double injectivity_gap = 0.0;     // min gap between images of distinct samples, t > 0
    double inverse_residual = 0.0;    // max |phi^{-1}(t, phi(t,x)) - x| where defined
    double jacobian_identity_residual = 0.0;  // max |det D phi(0,x) - 1|
    bool identity_ok = false;
    bool cocycle_ok = false;
    bool injective = false;
    bool inverse_ok = false;

    bool passes() const { return identity_ok && cocycle_ok && injective && inverse_ok; }
};

SemiflowSelfCheck semiflow_selfcheck(const Semiflow& phi, std::span<const double> t_samples,
                                     std::span<const double> s_samples,
                                     std::span<const double> x_samples, double tol = 1e-9);

} // namespace reclab
