#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "reclab/error.hpp"
#include "reclab/family.hpp"
#include "reclab/operator_matrix.hpp"
#include "reclab/semiflow.hpp"

using namespace reclab;

namespace {

constexpr double kPi = std::numbers::pi;

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error raised");
    return ErrorKind::Structural;
}

WeightedGridSpace halfline(const WeightFunction& rho, double h, double trunc, NormMode mode = NormMode::lp(1.0)) {
    return WeightedGridSpace::with_spacing(DomainSpec::half_line(trunc), h, mode, rho);
}

GridFunction random_function(const WeightedGridSpace& space, std::mt19937_64& gen) {
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<Complex> v(space.size());
    for (auto& x : v) x = Complex(n(gen), n(gen));
    return space.from_values(std::move(v));
}

Semiflow squared_time(const DomainSpec& d) {
    Semiflow::Parts parts;
    parts.name = "x + t^2";
    parts.domain = d;
    parts.forward = [](double t, double x) { return x + t * t; };
    parts.inverse_on_image = [](double t, double y) -> std::optional<double> { return y - t * t; };
    parts.jac_det = [](double, double) { return 1.0; };
    parts.image_indicator = [](double t, double y) { return y >= t * t; };
    return Semiflow(parts);
}

} // namespace

TEST_CASE("translation examples") {
    const auto s = halfline(weights::exp_decay(), 0.01, 20.0);
    const auto fam = make_translation_family(s);
    const auto f = hat(s, 1.0, 2.0);
    CHECK(fam.apply(0.0, f).same_values(f));
    // Grid-aligned shift by one unit moves the hat onto [0,1].
    CHECK(distance(s, fam.apply(1.0, f), hat(s, 0.0, 1.0)) <= 1e-12);
    CHECK_FALSE(fam.apply(1.0, f).truncated());
}

TEST_CASE("semigroup law against the analytic shift") {
    const auto bump = [](double c) {
        return [c](double x) { return Complex(std::exp(-4.0 * (x - c) * (x - c)), 0.0); };
    };
    for (double h : {0.04, 0.02, 0.01}) {
        const auto s = halfline(weights::exp_decay(), h, 20.0);
        const auto fam = make_translation_family(s);
        const auto f = s.sample(bump(5.0));
        const auto exact = s.sample(bump(5.0 - 1.2));
        const double law = distance(s, fam.apply(0.7, fam.apply(0.5, f)), fam.apply(1.2, f));
        const double interp = distance(s, fam.apply(1.2, f), exact);
        // Linear interpolation of this bump: |error| <= h^2 |f''|/8 <= h^2 pointwise.
        CHECK(interp <= h * h);
        CHECK(law <= 2.0 * h * h);
    }
}

TEST_CASE("families are linear") {
    std::mt19937_64 gen(7);
    const auto s = halfline(weights::exp_decay(), 0.05, 10.0);
    const auto d = DomainSpec::open_box(0.0, DomainSpec::kInf, 10.0);
    const auto sd = WeightedGridSpace::with_spacing(d, 0.05, NormMode::lp(2.0), weights::inverse_power(3.0));
    const std::vector<OperatorFamily> fams{make_translation_family(s),
                                           make_composition_family(sd, semiflows::dilation(d))};
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (const auto& fam : fams) {
        const auto& sp = fam.space();
        for (int k = 0; k < 50; ++k) {
            const auto f = random_function(sp, gen);
            const auto g = random_function(sp, gen);
            const Complex a(u(gen), -u(gen));
            const Complex b(-u(gen), u(gen));
            const double t = u(gen);
            const auto lhs = fam.apply(t, a * f + b * g);
            const auto rhs = a * fam.apply(t, f) + b * fam.apply(t, g);
            CHECK(distance(sp, lhs, rhs) <= 1e-12 * (1.0 + norm(sp, lhs)));
            CHECK(fam.apply(0.0, f).same_values(f));
        }
    }
}

TEST_CASE("composition examples") {
    const auto d = DomainSpec::open_box(0.0, DomainSpec::kInf, 4.0);
    const auto s = WeightedGridSpace::with_spacing(d, 0.001, NormMode::lp(1.0), weights::flat());
    const auto fam = make_composition_family(s, semiflows::dilation(d));
    const auto f = indicator(s, 1.0, 2.0);
    CHECK(fam.apply(0.0, f).same_values(f));
    const auto g = fam.apply(std::log(2.0), f);
    // Supported where 2x lies in [1,2], that is [0.5, 1].
    double lo = 10.0;
    double hi = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (std::abs(g[i]) > 0.5) {
            lo = std::min(lo, s.points()[i]);
            hi = std::max(hi, s.points()[i]);
        }
    }
    CHECK(lo == doctest::Approx(0.5).epsilon(2e-3));
    CHECK(hi == doctest::Approx(1.0).epsilon(2e-3));
    CHECK(norm(s, g) == doctest::Approx(0.5).epsilon(1e-2));
}

TEST_CASE("semiflow self-check") {
    const auto ts = std::vector<double>{0.0, 0.5, 1.0, 2.0};
    const auto xs = std::vector<double>{0.5, 1.0, 3.0, 7.0};
    SUBCASE("translation") {
        const auto r = semiflow_selfcheck(semiflows::translation(DomainSpec::half_line(50.0)), ts, ts, xs);
        CHECK(r.passes());
        CHECK(r.identity_residual == 0.0);
        CHECK(r.cocycle_residual <= 1e-15);
        CHECK(r.inverse_residual <= 1e-15);
    }
    SUBCASE("dilation") {
        const auto r = semiflow_selfcheck(semiflows::dilation(DomainSpec::open_box(0.0, DomainSpec::kInf, 1e3)),
                                          ts, ts, xs);
        CHECK(r.passes());
        CHECK(r.cocycle_residual <= 1e-12);
        CHECK(r.jacobian_identity_residual == 0.0);
    }
    SUBCASE("x + t^2 is not a semiflow") {
        const std::vector<double> one{1.0};
        const std::vector<double> zero{0.0};
        const auto r = semiflow_selfcheck(squared_time(DomainSpec::half_line(50.0)), one, one, zero);
        CHECK_FALSE(r.cocycle_ok);
        CHECK_FALSE(r.passes());
        CHECK(r.cocycle_residual > 0.1);
    }
    SUBCASE("negative times need a group") {
        const auto phi = semiflows::translation(DomainSpec::half_line(50.0));
        CHECK(kind_of([&] { phi.forward(-1.0, 3.0); }) == ErrorKind::SemiflowDomain);
        CHECK(phi.backward(1.0, 3.0).value() == doctest::Approx(2.0));
        CHECK_FALSE(phi.backward(5.0, 3.0).has_value());
    }
}

TEST_CASE("rotations") {
    const auto s = halfline(weights::exp_decay(), 0.05, 10.0);
    const auto fam = make_translation_family(s);
    const auto f = smooth_bump(s, 2.0, 4.0);
    CHECK(rotate_family(fam, 1.0).apply(1.3, f).same_values(fam.apply(1.3, f)));
    const auto neg = rotate_family(fam, -1.0).apply(1.3, f);
    CHECK(distance(s, neg, Complex(-1.0) * fam.apply(1.3, f)) == 0.0);
    CHECK(kind_of([&] { rotate_family(fam, Complex(1.1, 0.0)); }) == ErrorKind::InvalidRotation);

    const auto lam = std::polar(1.0, 2.0 * kPi / 3.0);
    const auto rot = rotate_family(fam, lam);
    const auto thrice = rot.apply(1.0, rot.apply(1.0, rot.apply(1.0, f)));
    const auto plain = fam.apply(1.0, fam.apply(1.0, fam.apply(1.0, f)));
    CHECK(distance(s, thrice, plain) <= 1e-14);

    const RationalRotation r{1, 3};
    CHECK(r.power(3) == Complex(1.0, 0.0));
    CHECK(r.power(300) == Complex(1.0, 0.0));
    CHECK(std::abs(r.power(1) - lam) <= 1e-15);
}

TEST_CASE("time discretization") {
    const auto s = halfline(weights::exp_decay(), 0.05, 10.0);
    const auto fam = make_translation_family(s);
    const auto op = time_discretize(fam, 0.5);
    const auto f = smooth_bump(s, 2.0, 4.0);
    CHECK(op.iterate(0, f).value.same_values(f));
    CHECK(distance(s, op.iterate(3, f).value, fam.apply(1.5, f)) == 0.0);
    CHECK(distance(s, op.iterate(3, f, true).value, op.iterate(3, f).value) <= 1e-15);
    CHECK(op.iterate(30, f).beyond_horizon);
    CHECK_FALSE(op.iterate(5, f).beyond_horizon);

    const auto cs = WeightedGridSpace::coordinates(2);
    const auto diag = time_discretize(make_diagonal_family(cs, {2.0 * kPi, 4.0 * kPi}), 1.0);
    const auto v = cs.from_values({Complex(1.0, 2.0), Complex(-0.5, 0.25)});
    for (long long n : {1LL, 2LL, 17LL, 1000LL}) CHECK(distance(cs, diag.iterate(n, v).value, v) <= 1e-11);
}

TEST_CASE("direct sums act componentwise") {
    const auto s = halfline(weights::exp_decay(), 0.05, 10.0);
    const auto fam = make_translation_family(s);
    const auto sum = direct_sum(fam, fam);
    const auto f = smooth_bump(s, 2.0, 4.0);
    const auto g = hat(s, 1.0, 3.0);
    const auto out = sum.apply(0.75, sum.space().join(f, g));
    CHECK(sum.space().component(out, 0).same_values(fam.apply(0.75, f)));
    CHECK(sum.space().component(out, 1).same_values(fam.apply(0.75, g)));
}

TEST_CASE("operator matrices") {
    SUBCASE("t = 0 is the identity") {
        const auto s = halfline(weights::exp_decay(), 0.1, 5.0);
        const auto m = assemble_matrix(s, make_translation_family(s), 0.0);
        CHECK(m.entries.isApprox(Eigen::MatrixXcd::Identity(m.size(), m.size())));
        CHECK(operator_norm_estimate(m) == doctest::Approx(1.0));
        OperatorMatrix twice = m;
        twice.entries *= 2.0;
        CHECK(operator_norm_estimate(twice) == doctest::Approx(2.0));
        const auto r = spectral_radius_estimate(m);
        CHECK(r.r == doctest::Approx(1.0));
    }
    SUBCASE("one grid step is a shift") {
        const auto s = halfline(weights::flat(), 0.1, 5.0);
        const auto m = assemble_matrix(s, make_translation_family(s), 0.1);
        for (Eigen::Index i = 0; i < m.size(); ++i) {
            for (Eigen::Index j = 0; j < m.size(); ++j) {
                CHECK(std::abs(m.entries(i, j) - Complex(j == i + 1 ? 1.0 : 0.0)) <= 1e-12);
            }
        }
    }
    SUBCASE("diagonal families") {
        const auto cs = WeightedGridSpace::coordinates(3);
        const std::vector<double> th{0.3, 1.7, kPi};
        const auto fam = make_diagonal_family(cs, th);
        const auto m = assemble_matrix(cs, fam, 1.0);
        for (int j = 0; j < 3; ++j) CHECK(std::abs(m.entries(j, j) - std::exp(Complex(0.0, th[j]))) <= 1e-15);
        CHECK(spectral_radius_estimate(m).r == doctest::Approx(1.0));
        const auto single = make_diagonal_family(WeightedGridSpace::coordinates(1), {kPi});
        CHECK(operator_norm_estimate(assemble_matrix(single.space(), single, 1.0).minus_identity()) ==
              doctest::Approx(2.0));
    }
    SUBCASE("matrix and apply agree") {
        std::mt19937_64 gen(3);
        const auto s = halfline(weights::exp_decay(), 0.1, 5.0, NormMode::lp(2.0));
        const auto fam = make_translation_family(s);
        const auto m = assemble_matrix(s, fam, 0.37);
        for (int k = 0; k < 20; ++k) {
            const auto f = random_function(s, gen);
            CHECK(distance(s, m.apply(s, f), fam.apply(0.37, f)) <= 1e-12 * (1.0 + norm(s, f)));
        }
    }
    SUBCASE("cap") {
        const auto s = halfline(weights::flat(), 0.01, 100.0);
        CHECK(kind_of([&] { assemble_matrix(s, make_translation_family(s), 1.0, 1000); }) == ErrorKind::Size);
    }
}

TEST_CASE("spectral radius under a growing weight") {
    const auto s = halfline(weights::exp_growth(), 0.01, 20.48);
    const auto fam = make_translation_family(s);
    const auto m = assemble_matrix(s, fam, 1.0);
    const auto r = spectral_radius_estimate(m);
    CHECK(r.converged);
    CHECK(r.r < 0.75);
    // ||T(1)|| <= e^{-1} on L^1 with weight e^x.
    CHECK(operator_norm_estimate(m) <= std::exp(-1.0) + 1e-9);
}

TEST_CASE("norm bounds dominate the action") {
    std::mt19937_64 gen(11);
    const auto d = DomainSpec::open_box(0.0, DomainSpec::kInf, 20.0);
    const auto s = WeightedGridSpace::with_spacing(d, 0.05, NormMode::lp(1.0), weights::inverse_power(3.0));
    const auto fam = make_composition_family(s, semiflows::dilation(d));
    for (double t : {0.1, 0.5, 1.5}) {
        const double bound = fam.norm_bound(t);
        for (int k = 0; k < 20; ++k) {
            const auto f = random_function(s, gen);
            CHECK(norm(s, fam.apply(t, f)) <= bound * norm(s, f) * (1.0 + 1e-12));
        }
    }
}
