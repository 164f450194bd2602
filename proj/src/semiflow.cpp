#include "reclab/semiflow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "reclab/error.hpp"

namespace reclab {

Semiflow::Semiflow(Parts parts) : parts_(std::move(parts)) {
    if (!parts_.forward || !parts_.jac_det) {
        throw Error(ErrorKind::Structural, "semiflow requires forward map and Jacobian");
    }
    if (!parts_.image_indicator) {
        auto inv = parts_.inverse_on_image;
        parts_.image_indicator = [inv](double t, double y) { return inv && inv(t, y).has_value(); };
    }
}

double Semiflow::forward(double t, double x) const {
    if (t < 0.0 && !parts_.group_like) {
        throw Error(ErrorKind::SemiflowDomain, parts_.name + " is not defined for negative time");
    }
    double y = parts_.forward(t, x);
    if (std::isnan(y)) throw Error(ErrorKind::SemiflowDomain, parts_.name + " evaluated to NaN");
    return y;
}

std::optional<double> Semiflow::inverse_on_image(double t, double y) const {
    if (!parts_.inverse_on_image) return std::nullopt;
    return parts_.inverse_on_image(t, y);
}

double Semiflow::jac_det(double t, double x) const { return parts_.jac_det(t, x); }

bool Semiflow::in_image(double t, double y) const { return parts_.image_indicator(t, y); }

std::optional<double> Semiflow::backward(double t, double x) const {
    if (parts_.group_like) return parts_.forward(-t, x);
    return inverse_on_image(t, x);
}

std::optional<double> Semiflow::backward_jac_det(double t, double x) const {
    if (parts_.group_like) return parts_.jac_det(-t, x);
    auto pre = inverse_on_image(t, x);
    if (!pre) return std::nullopt;
    double d = parts_.jac_det(t, *pre);
    if (d == 0.0) return std::nullopt;
    return 1.0 / d;
}

Semiflow Semiflow::reversed() const {
    if (!parts_.group_like) {
        throw Error(ErrorKind::SemiflowDomain, parts_.name + " cannot be reversed (not a group)");
    }
    Parts p = parts_;
    auto fwd = parts_.forward;
    auto jac = parts_.jac_det;
    p.name = parts_.name + "-reversed";
    p.forward = [fwd](double t, double x) { return fwd(-t, x); };
    p.jac_det = [jac](double t, double x) { return jac(-t, x); };
    p.inverse_on_image = [fwd](double t, double y) -> std::optional<double> { return fwd(t, y); };
    p.image_indicator = [](double, double) { return true; };
    return Semiflow(std::move(p));
}

namespace semiflows {

Semiflow translation(const DomainSpec& domain) {
    Semiflow::Parts p;
    p.name = "translation";
    p.domain = domain;
    p.group_like = domain.kind() == DomainKind::Line;
    p.forward = [](double t, double x) { return x + t; };
    p.jac_det = [](double, double) { return 1.0; };
    p.inverse_on_image = [domain](double t, double y) -> std::optional<double> {
        double x = y - t;
        if (!domain.contains(x)) return std::nullopt;
        return x;
    };
    p.image_indicator = [domain](double t, double y) { return domain.contains(y - t); };
    return Semiflow(std::move(p));
}

Semiflow backward_translation(const DomainSpec& domain) {
    if (domain.kind() != DomainKind::Line) {
        throw Error(ErrorKind::SemiflowDomain, "backward translation needs a line domain");
    }
    Semiflow::Parts p;
    p.name = "backward_translation";
    p.domain = domain;
    p.group_like = true;
    p.forward = [](double t, double x) { return x - t; };
    p.jac_det = [](double, double) { return 1.0; };
    p.inverse_on_image = [](double t, double y) -> std::optional<double> { return y + t; };
    p.image_indicator = [](double, double) { return true; };
    return Semiflow(std::move(p));
}

Semiflow dilation(const DomainSpec& domain, double rate) {
    Semiflow::Parts p;
    p.name = "dilation";
    p.domain = domain;
    p.group_like = true;
    p.forward = [rate](double t, double x) { return x * std::exp(rate * t); };
    p.jac_det = [rate](double t, double) { return std::exp(rate * t); };
    p.inverse_on_image = [rate](double t, double y) -> std::optional<double> {
        return y * std::exp(-rate * t);
    };
    p.image_indicator = [](double, double) { return true; };
    return Semiflow(std::move(p));
}

Semiflow affine(const DomainSpec& domain, double a, double b) {
    if (a == 0.0) throw Error(ErrorKind::Validation, "affine flow requires a != 0");
    Semiflow::Parts p;
    p.name = "affine";
    p.domain = domain;
    p.group_like = true;
    const double c = b / a;
    p.forward = [a, c](double t, double x) { return std::exp(a * t) * (x + c) - c; };
    p.jac_det = [a](double t, double) { return std::exp(a * t); };
    p.inverse_on_image = [a, c](double t, double y) -> std::optional<double> {
        return std::exp(-a * t) * (y + c) - c;
    };
    p.image_indicator = [](double, double) { return true; };
    return Semiflow(std::move(p));
}

Semiflow make(const std::string& name, const ParamMap& params, const DomainSpec& domain) {
    auto get = [&](const char* key, double fallback) {
        auto it = params.find(key);
        return it == params.end() ? fallback : it->second;
    };
    if (name == "translation") return translation(domain);
    if (name == "backward_translation") return backward_translation(domain);
    if (name == "dilation") return dilation(domain, get("rate", 1.0));
    if (name == "affine") return affine(domain, get("a", 1.0), get("b", 0.0));
    throw Error(ErrorKind::Validation, "unknown semiflow name '" + name + "'");
}

std::vector<std::string> names() { return {"translation", "backward_translation", "dilation", "affine"}; }

} // namespace semiflows

SemiflowSelfCheck semiflow_selfcheck(const Semiflow& phi, std::span<const double> t_samples,
                                     std::span<const double> s_samples,
                                     std::span<const double> x_samples, double tol) {
    SemiflowSelfCheck r;
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(a)); };
    for (double x : x_samples) {
        r.identity_residual = std::max(r.identity_residual, std::abs(phi.forward(0.0, x) - x));
        r.jacobian_identity_residual =
            std::max(r.jacobian_identity_residual, std::abs(phi.jac_det(0.0, x) - 1.0));
    }
    for (double t : t_samples) {
        for (double s : s_samples) {
            for (double x : x_samples) {
                double direct = phi.forward(t + s, x);
                double chained = phi.forward(t, phi.forward(s, x));
                r.cocycle_residual = std::max(r.cocycle_residual, rel(direct, chained));
            }
        }
    }
    r.injectivity_gap = std::numeric_limits<double>::infinity();
    bool any_positive_t = false;
    std::vector<double> sorted_x(x_samples.begin(), x_samples.end());
    std::sort(sorted_x.begin(), sorted_x.end());
    sorted_x.erase(std::unique(sorted_x.begin(), sorted_x.end()), sorted_x.end());
    for (double t : t_samples) {
        if (!(t > 0.0)) continue;
        any_positive_t = true;
        std::vector<double> images;
        images.reserve(sorted_x.size());
        for (double x : sorted_x) {
            double y = phi.forward(t, x);
            images.push_back(y);
            if (auto back = phi.inverse_on_image(t, y)) {
                r.inverse_residual = std::max(r.inverse_residual, rel(*back, x));
            }
        }
        std::sort(images.begin(), images.end());
        for (std::size_t i = 1; i < images.size(); ++i) {
            r.injectivity_gap = std::min(r.injectivity_gap, images[i] - images[i - 1]);
        }
    }
    if (!any_positive_t || sorted_x.size() < 2) r.injectivity_gap = 0.0;
    r.identity_ok = r.identity_residual <= tol && r.jacobian_identity_residual <= tol;
    r.cocycle_ok = r.cocycle_residual <= tol;
    r.injective = r.injectivity_gap > 0.0;
    r.inverse_ok = r.inverse_residual <= tol;
    return r;
}

} // namespace reclab
