#include "reclab/family.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "reclab/error.hpp"

namespace reclab {

const char* to_string(FamilyKind kind) {
    switch (kind) {
    case FamilyKind::Translation: return "translation";
    case FamilyKind::Composition: return "composition";
    case FamilyKind::Diagonal: return "diagonal";
    case FamilyKind::DirectSum: return "direct_sum";
    case FamilyKind::Rotated: return "rotated";
    }
    return "?";
}

OperatorFamily::OperatorFamily(WeightedGridSpace space, Parts parts)
    : space_(std::move(space)), parts_(std::move(parts)) {
    if (!parts_.apply || !parts_.norm_bound) {
        throw Error(ErrorKind::Structural, "operator family requires apply and norm bound");
    }
}

GridFunction OperatorFamily::apply(double t, const GridFunction& f) const {
    space_.require_member(f);
    if (t < 0.0 && parts_.time_domain == TimeDomain::Forward) {
        throw Error(ErrorKind::Structural, "negative time on a forward family");
    }
    // lambda T(0) = lambda I is the one family member that is not the identity.
    if (t == 0.0 && parts_.kind != FamilyKind::Rotated) return f;
    return parts_.apply(t, f);
}

double OperatorFamily::norm_bound(double t) const { return parts_.norm_bound(t); }

namespace {

GridFunction read_along(const WeightedGridSpace& space, const GridFunction& f,
                        const std::function<double(double)>& target) {
    space.require_member(f);
    const auto xs = space.points();
    const bool flag_outside = space.domain().kind() != DomainKind::HalfLine;
    std::vector<Complex> out(xs.size());
    bool truncated = f.truncated();
    for (std::size_t i = 0; i < xs.size(); ++i) {
        PointRead r = space.read(f, target(xs[i]));
        out[i] = r.value;
        truncated = truncated || (r.outside && flag_outside);
    }
    return GridFunction(space.id(), std::move(out), truncated);
}

} // namespace

GridFunction translate_apply(const WeightedGridSpace& space, const GridFunction& f, double t) {
    if (t == 0.0) {
        space.require_member(f);
        return f;
    }
    return read_along(space, f, [t](double x) { return x + t; });
}

GridFunction compose_apply(const WeightedGridSpace& space, const GridFunction& f, double t,
                           const Semiflow& phi) {
    if (t == 0.0) {
        space.require_member(f);
        return f;
    }
    const DomainSpec& domain = space.domain();
    return read_along(space, f, [&](double x) {
        double y = phi.forward(t, x);
        if (!domain.contains(y) && !std::isinf(y)) {
            throw Error(ErrorKind::SemiflowDomain,
                        phi.name() + " maps x=" + std::to_string(x) + " outside the domain");
        }
        return y;
    });
}

double composition_norm_bound(const WeightedGridSpace& space, double t, const Semiflow& phi) {
    const auto xs = space.points();
    const auto rho = space.weight_samples();
    const auto w = space.quad_weights();
    const NormMode mode = space.mode();
    if (mode.is_sup()) {
        double best = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            Stencil st = space.locate(phi.forward(t, xs[i]));
            if (st.outside) continue;
            double row = st.w0 / rho[st.i0] + (st.w1 > 0.0 ? st.w1 / rho[st.i1] : 0.0);
            best = std::max(best, rho[i] * row);
        }
        return best;
    }
    std::vector<double> col(xs.size(), 0.0);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        Stencil st = space.locate(phi.forward(t, xs[i]));
        if (st.outside) continue;
        const double c = rho[i] * w[i];
        col[st.i0] += c * st.w0;
        if (st.w1 > 0.0) col[st.i1] += c * st.w1;
    }
    double best = 0.0;
    for (std::size_t j = 0; j < xs.size(); ++j) best = std::max(best, col[j] / (rho[j] * w[j]));
    return std::pow(best, 1.0 / mode.p);
}

OperatorFamily make_translation_family(const WeightedGridSpace& space) {
    Semiflow phi = semiflows::translation(space.domain());
    OperatorFamily::Parts p;
    p.kind = FamilyKind::Translation;
    p.description = "left translation on " + space.domain().describe() + ", rho=" + space.weight_label();
    p.time_domain = phi.group_like() ? TimeDomain::Group : TimeDomain::Forward;
    p.apply = [space](double t, const GridFunction& f) { return translate_apply(space, f, t); };
    p.norm_bound = [space, phi](double t) { return composition_norm_bound(space, t, phi); };
    p.exact_in_time = true;
    p.semiflow = phi;
    return OperatorFamily(space, std::move(p));
}

OperatorFamily make_composition_family(const WeightedGridSpace& space, const Semiflow& phi) {
    OperatorFamily::Parts p;
    p.kind = FamilyKind::Composition;
    p.description = "composition with " + phi.name() + " on " + space.domain().describe() +
                    ", rho=" + space.weight_label();
    p.time_domain = phi.group_like() ? TimeDomain::Group : TimeDomain::Forward;
    p.apply = [space, phi](double t, const GridFunction& f) { return compose_apply(space, f, t, phi); };
    p.norm_bound = [space, phi](double t) { return composition_norm_bound(space, t, phi); };
    p.exact_in_time = phi.closed_form();
    p.semiflow = phi;
    return OperatorFamily(space, std::move(p));
}

OperatorFamily make_diagonal_family(const WeightedGridSpace& space, std::vector<double> frequencies) {
    if (frequencies.size() != space.size()) {
        throw Error(ErrorKind::Structural, "diagonal family needs one frequency per coordinate");
    }
    // Phases are tracked in cycles so integer periods give exactly 1.
    std::vector<double> cycles(frequencies.size());
    for (std::size_t j = 0; j < cycles.size(); ++j) {
        cycles[j] = frequencies[j] / (2.0 * std::numbers::pi);
    }
    OperatorFamily::Parts p;
    p.kind = FamilyKind::Diagonal;
    p.description = "diagonal semigroup, " + std::to_string(frequencies.size()) + " frequencies";
    p.time_domain = TimeDomain::Group;
    p.apply = [space, cycles](double t, const GridFunction& f) {
        std::vector<Complex> out(f.values().begin(), f.values().end());
        for (std::size_t j = 0; j < out.size(); ++j) {
            double turns = cycles[j] * t;
            double frac = turns - std::nearbyint(turns);
            if (frac != 0.0) out[j] *= std::polar(1.0, 2.0 * std::numbers::pi * frac);
        }
        return GridFunction(space.id(), std::move(out), f.truncated());
    };
    p.norm_bound = [](double) { return 1.0; };
    p.exact_in_time = true;
    p.frequencies = std::move(frequencies);
    return OperatorFamily(space, std::move(p));
}

OperatorFamily rotate_family(const OperatorFamily& family, Complex lambda) {
    if (std::abs(std::abs(lambda) - 1.0) > 1e-12) {
        throw Error(ErrorKind::InvalidRotation, "rotation requires |lambda| = 1");
    }
    OperatorFamily::Parts p;
    p.kind = FamilyKind::Rotated;
    p.description = "rotated(" + family.description() + ")";
    p.time_domain = family.time_domain();
    p.apply = [family, lambda](double t, const GridFunction& f) { return lambda * family.apply(t, f); };
    p.norm_bound = [family](double t) { return family.norm_bound(t); };
    p.exact_in_time = family.exact_in_time();
    p.semiflow = family.semiflow();
    p.rotation = lambda * family.rotation();
    return OperatorFamily(family.space(), std::move(p));
}

OperatorFamily direct_sum(const OperatorFamily& a, const OperatorFamily& b) {
    if (a.time_domain() != b.time_domain()) {
        throw Error(ErrorKind::Structural, "direct sum needs matching time domains");
    }
    WeightedGridSpace product = WeightedGridSpace::product(a.space(), b.space());
    OperatorFamily::Parts p;
    p.kind = FamilyKind::DirectSum;
    p.description = a.description() + " (+) " + b.description();
    p.time_domain = a.time_domain();
    p.apply = [a, b, product](double t, const GridFunction& f) {
        return product.join(a.apply(t, product.component(f, 0)), b.apply(t, product.component(f, 1)));
    };
    p.norm_bound = [a, b](double t) { return std::max(a.norm_bound(t), b.norm_bound(t)); };
    p.exact_in_time = a.exact_in_time() && b.exact_in_time();
    return OperatorFamily(product, std::move(p));
}

// ------------------------------------------------------------ discretization

Complex RationalRotation::value() const { return power(1); }

Complex RationalRotation::power(long long n) const {
    if (q <= 0) throw Error(ErrorKind::InvalidRotation, "rational rotation needs q > 0");
    long long k = ((p % q) * (n % q)) % q;
    if (k < 0) k += q;
    if (k == 0) return {1.0, 0.0};
    return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(q));
}

DiscreteOperator::DiscreteOperator(OperatorFamily family, double t0)
    : family_(std::move(family)), t0_(t0) {
    if (!(t0 > 0.0)) throw Error(ErrorKind::Structural, "time step t0 must be positive");
}

double DiscreteOperator::horizon() const {
    const auto& space = family_.space();
    if (space.is_product()) return space.components()[0].domain().window().width();
    return space.domain().window().width();
}

Complex DiscreteOperator::power(long long n) const {
    if (rational_) return rational_->power(n);
    if (lambda_ == Complex{1.0, 0.0}) return lambda_;
    return std::pow(lambda_, static_cast<double>(n));
}

IterateResult DiscreteOperator::iterate(long long n, const GridFunction& f, bool force_composed) const {
    if (n < 0) throw Error(ErrorKind::Structural, "iterate index must be non-negative");
    IterateResult r;
    r.beyond_horizon = static_cast<double>(n) * t0_ > horizon();
    if (n == 0) {
        family_.space().require_member(f);
        r.value = f;
        return r;
    }
    if (family_.exact_in_time() && !force_composed) {
        r.path = IteratePath::ExactInTime;
        r.value = family_.apply(static_cast<double>(n) * t0_, f);
    } else {
        r.path = IteratePath::Composed;
        GridFunction g = f;
        for (long long k = 0; k < n; ++k) g = family_.apply(t0_, g);
        r.value = std::move(g);
    }
    Complex factor = power(n);
    if (factor != Complex{1.0, 0.0}) r.value *= factor;
    return r;
}

GridFunction DiscreteOperator::apply(const GridFunction& f) const { return iterate(1, f).value; }

DiscreteOperator DiscreteOperator::rotated(RationalRotation r) const {
    if (r.q <= 0) throw Error(ErrorKind::InvalidRotation, "rational rotation needs q > 0");
    if (rational_ || lambda_ != Complex{1.0, 0.0}) {
        throw Error(ErrorKind::InvalidRotation, "operator is already rotated");
    }
    DiscreteOperator out = *this;
    out.rational_ = r;
    out.lambda_ = r.value();
    return out;
}

DiscreteOperator DiscreteOperator::rotated(Complex lambda) const {
    if (std::abs(std::abs(lambda) - 1.0) > 1e-12) {
        throw Error(ErrorKind::InvalidRotation, "rotation requires |lambda| = 1");
    }
    if (rational_) throw Error(ErrorKind::InvalidRotation, "operator is already rotated");
    DiscreteOperator out = *this;
    out.lambda_ = lambda_ * lambda;
    return out;
}

DiscreteOperator time_discretize(const OperatorFamily& family, double t0) { return {family, t0}; }

DiscreteOperator rotate_operator(const DiscreteOperator& op, Complex lambda) { return op.rotated(lambda); }

DiscreteOperator rotate_operator(const DiscreteOperator& op, RationalRotation lambda) {
    return op.rotated(lambda);
}

} // namespace reclab
