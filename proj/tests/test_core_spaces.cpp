#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "reclab/admissibility.hpp"
#include "reclab/error.hpp"
#include "reclab/semiflow.hpp"
#include "reclab/space.hpp"

using namespace reclab;

namespace {

WeightedGridSpace halfline_l1(const WeightFunction& rho, double h = 0.01, double trunc = 200.0) {
    return WeightedGridSpace::with_spacing(DomainSpec::half_line(trunc), h, NormMode::lp(1.0), rho);
}

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error raised");
    return ErrorKind::Structural;
}

GridFunction random_function(const WeightedGridSpace& space, std::mt19937_64& gen) {
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<Complex> v(space.size());
    for (auto& x : v) x = Complex(n(gen), n(gen));
    return space.from_values(std::move(v));
}

} // namespace

TEST_CASE("domain windows") {
    CHECK(DomainSpec::half_line(5.0).window().low == 0.0);
    CHECK(DomainSpec::half_line(5.0).window().high == 5.0);
    CHECK(DomainSpec::line(5.0).window().low == -5.0);
    const auto box = DomainSpec::open_box(0.0, DomainSpec::kInf, 7.0);
    CHECK(box.window().high == 7.0);
    CHECK_FALSE(box.contains(0.0));
    CHECK(DomainSpec::half_line().contains(0.0));
    CHECK(kind_of([] { DomainSpec::open_box(1.0, 1.0); }) == ErrorKind::Structural);
    CHECK(kind_of([] { DomainSpec::line(0.0); }) == ErrorKind::Structural);
}

TEST_CASE("grid layout") {
    const auto s = halfline_l1(weights::exp_decay(), 0.1, 2.0);
    REQUIRE(s.size() == 20);
    CHECK(s.points()[0] == doctest::Approx(0.05));
    for (std::size_t i = 1; i < s.size(); ++i) CHECK(s.points()[i] > s.points()[i - 1]);
    for (double w : s.quad_weights()) CHECK(w > 0.0);
    CHECK(s.weight_samples().size() == s.size());
    CHECK(kind_of([] { NormMode::lp(0.5); }) == ErrorKind::Validation);
}

TEST_CASE("norm examples") {
    const auto flat = halfline_l1(weights::flat());
    CHECK(norm(flat, flat.zeros()) == 0.0);
    CHECK(norm(flat, indicator(flat, 0.0, 1.0)) == doctest::Approx(1.0).epsilon(1e-9));

    // Reference: midpoint sum of e^{-x} on [0,1] at 10^6 points.
    double oracle = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) oracle += std::exp(-(i + 0.5) / n) / n;
    const auto dec = halfline_l1(weights::exp_decay());
    CHECK(std::abs(norm(dec, indicator(dec, 0.0, 1.0)) - oracle) < 1e-5);
    CHECK(oracle == doctest::Approx(0.632121).epsilon(1e-6));
}

TEST_CASE("distance examples") {
    const auto flat = halfline_l1(weights::flat());
    const auto f = indicator(flat, 0.0, 1.0);
    const auto g = indicator(flat, 1.0, 2.0);
    CHECK(distance(flat, f, f) == 0.0);
    CHECK(distance(flat, f, flat.zeros()) == norm(flat, f));
    CHECK(distance(flat, f, g) == doctest::Approx(2.0).epsilon(1e-9));

    const auto other = halfline_l1(weights::flat(), 0.02);
    CHECK(kind_of([&] { distance(flat, f, indicator(other, 0.0, 1.0)); }) == ErrorKind::Structural);
    CHECK(kind_of([&] { flat.from_values(std::vector<Complex>(3)); }) == ErrorKind::Structural);
}

TEST_CASE("norm axioms on random functions") {
    std::mt19937_64 gen(42);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    const std::vector<NormMode> modes{NormMode::lp(1.0), NormMode::lp(2.0), NormMode::lp(3.5), NormMode::sup()};
    for (const auto& mode : modes) {
        const auto s = WeightedGridSpace::with_spacing(DomainSpec::line(5.0), 0.1, mode, weights::symmetric_exp());
        for (int k = 0; k < 100; ++k) {
            const auto f = random_function(s, gen);
            const auto g = random_function(s, gen);
            const Complex a(u(gen), u(gen));
            const double nf = norm(s, f);
            CHECK(nf >= 0.0);
            CHECK(std::abs(norm(s, a * f) - std::abs(a) * nf) <= 1e-12 * (1.0 + std::abs(a) * nf));
            CHECK(norm(s, f + g) <= nf + norm(s, g) + 1e-12);
        }
    }
}

TEST_CASE("product space norm is the max of the components") {
    const auto a = halfline_l1(weights::exp_decay(), 0.1, 5.0);
    const auto p = WeightedGridSpace::product(a, a);
    const auto f = indicator(a, 0.0, 1.0);
    GridFunction g = f;
    g *= Complex(0.0, 0.5);
    const auto joined = p.join(f, g);
    CHECK(norm(p, joined) == std::max(norm(a, f), norm(a, g)));
    CHECK(p.component(joined, 1).same_values(g));
}

TEST_CASE("invalid weights") {
    const WeightFunction bad("bad", [](double x) { return x - 1.0; }, 1.0, 0.0);
    CHECK(kind_of([&] { bad(0.5); }) == ErrorKind::InvalidWeight);
    CHECK(kind_of([&] { halfline_l1(bad); }) == ErrorKind::InvalidWeight);
    const auto ts = linspace(0.0, 2.0, 5);
    CHECK(kind_of([&] { check_weight_admissible(bad, DomainSpec::half_line(5.0), ts, ts); }) ==
          ErrorKind::InvalidWeight);
    CHECK(kind_of([] { weights::make("foo", {}); }) == ErrorKind::Validation);
}

TEST_CASE("scalar weight admissibility") {
    const auto d = DomainSpec::half_line(50.0);
    const auto ts = linspace(0.0, 40.0, 81);
    const auto shifts = linspace(-5.0, 5.0, 21);
    SUBCASE("exponential decay holds") {
        const auto c = check_weight_admissible(weights::exp_decay(), d, ts, shifts);
        CHECK(c.holds);
        CHECK_FALSE(c.witness_point.has_value());
        CHECK(c.worst_ratio <= 1.0 + kAdmissibilityTol);
    }
    SUBCASE("exponential growth holds") {
        CHECK(check_weight_admissible(weights::exp_growth(), d, ts, shifts).holds);
    }
    SUBCASE("gaussian fails with a witness") {
        // e^{-x^2} underflows to 0 beyond x ~ 27; stay inside the representable range.
        const auto c = check_weight_admissible(weights::gaussian(1.0, 1.0), DomainSpec::half_line(20.0),
                                               linspace(0.0, 14.0, 29), shifts);
        CHECK_FALSE(c.holds);
        CHECK(c.worst_ratio > 1.0 + kAdmissibilityTol);
        CHECK(c.witness_point.has_value());
        CHECK(c.witness_time.has_value());
    }
    SUBCASE("flat weight is the equality case") {
        const auto c = check_weight_admissible(weights::flat().with_constants(1.0, 0.0), d, ts, shifts);
        CHECK(c.holds);
        CHECK(c.worst_ratio == doctest::Approx(1.0));
    }
}

TEST_CASE("Lp semiflow admissibility") {
    const auto ts = linspace(0.0, 5.0, 21);
    SUBCASE("translation reduces to the scalar case") {
        const auto d = DomainSpec::half_line(50.0);
        const auto c = check_lp_semiflow_admissible(weights::exp_decay(), semiflows::translation(d), d, ts,
                                                    linspace(0.0, 40.0, 81), 1.0, 1.0);
        CHECK(c.holds);
    }
    SUBCASE("flat translation has ratio exactly 1") {
        const auto d = DomainSpec::half_line(50.0);
        const auto c = check_lp_semiflow_admissible(weights::flat(), semiflows::translation(d), d, ts,
                                                    linspace(0.0, 40.0, 81), 1.0, 0.0);
        CHECK(c.holds);
        CHECK(c.worst_ratio == doctest::Approx(1.0));
    }
    SUBCASE("dilation with inverse square weight") {
        const auto d = DomainSpec::open_box(0.0, DomainSpec::kInf, 1e6);
        const auto c = check_lp_semiflow_admissible(weights::inverse_power(2.0), semiflows::dilation(d), d, ts,
                                                    geomspace(1e-4, 1e3, 60), 1.0, 3.0);
        CHECK(c.holds);
    }
    SUBCASE("singular Jacobian is a failure with witness") {
        const auto d = DomainSpec::half_line(10.0);
        Semiflow::Parts parts;
        parts.name = "collapse";
        parts.domain = d;
        parts.forward = [](double t, double x) { return x + t; };
        parts.inverse_on_image = [](double t, double y) -> std::optional<double> { return y - t; };
        parts.jac_det = [](double t, double) { return t > 0.0 ? 0.0 : 1.0; };
        parts.image_indicator = [](double t, double y) { return y >= t; };
        const auto c = check_lp_semiflow_admissible(weights::exp_decay(), Semiflow(parts), d, ts,
                                                    linspace(0.0, 5.0, 11), 1.0, 1.0);
        CHECK_FALSE(c.holds);
        CHECK(c.witness_point.has_value());
    }
}

TEST_CASE("C0 semiflow admissibility") {
    const std::vector<CompactBox> ks{{0.0, 1.0}};
    SUBCASE("translation with exponential decay") {
        const auto d = DomainSpec::half_line(50.0);
        const auto c = check_c0_semiflow_admissible(weights::exp_decay(), semiflows::translation(d), d,
                                                    linspace(0.0, 5.0, 11), linspace(0.0, 50.0, 201), ks, 1.0, 1.0);
        CHECK(c.holds);
    }
    SUBCASE("flat translation on the line") {
        const auto d = DomainSpec::line(50.0);
        const auto c = check_c0_semiflow_admissible(weights::flat(), semiflows::translation(d), d,
                                                    linspace(0.0, 5.0, 11), linspace(-50.0, 50.0, 401), ks, 1.0, 0.0);
        CHECK(c.holds);
    }
    SUBCASE("dilation with rational hump") {
        const auto d = DomainSpec::open_box(0.0, DomainSpec::kInf, 1e4);
        const std::vector<CompactBox> k12{{1.0, 2.0}};
        const auto c = check_c0_semiflow_admissible(weights::rational_hump(), semiflows::dilation(d), d,
                                                    linspace(0.0, 3.0, 13), geomspace(1e-4, 1e4, 200), k12, 1.0,
                                                    1.0);
        CHECK(c.holds);
    }
}

TEST_CASE("condition D") {
    const std::vector<CompactBox> k01{{0.0, 1.0}};
    SUBCASE("translation on the half-line escapes after t = 1") {
        const auto d = DomainSpec::half_line(20.0);
        const auto c = check_condition_D(semiflows::translation(d), k01, linspace(0.0, 10.0, 101),
                                         linspace(0.0, 20.0, 201));
        CHECK(c.holds);
        REQUIRE(c.escape_times.size() == 1);
        CHECK(c.escape_times[0] == doctest::Approx(1.1).epsilon(0.1));
    }
    SUBCASE("translation on the line never escapes") {
        const auto d = DomainSpec::line(20.0);
        const auto c = check_condition_D(semiflows::translation(d), k01, linspace(0.0, 10.0, 101),
                                         linspace(-20.0, 20.0, 401));
        CHECK_FALSE(c.holds);
    }
    SUBCASE("dilation escapes once e^t x_min exceeds 2") {
        const auto d = DomainSpec::open_box(0.0, DomainSpec::kInf, 100.0);
        const std::vector<CompactBox> k12{{1.0, 2.0}};
        const auto xs = geomspace(0.5, 100.0, 100);
        const auto c = check_condition_D(semiflows::dilation(d), k12, linspace(0.0, 3.0, 301), xs);
        CHECK(c.holds);
        REQUIRE(c.escape_times.size() == 1);
        CHECK(c.escape_times[0] * 1.0 >= std::log(2.0 / 0.5) - 1e-9);
        CHECK(c.escape_times[0] <= std::log(2.0 / 0.5) + 0.02);
        // With samples reaching down to 1e-3, escape needs e^t > 2000, beyond t = 3.
        const auto c2 = check_condition_D(semiflows::dilation(d), k12, linspace(0.0, 3.0, 301),
                                          geomspace(1e-3, 100.0, 100));
        CHECK_FALSE(c2.holds);
    }
}

TEST_CASE("quadrature converges as h halves") {
    const double exact = 1.0 - std::exp(-1.0);
    double prev = -1.0;
    for (double h : {0.1, 0.05, 0.025, 0.0125}) {
        const auto s = halfline_l1(weights::exp_decay(), h, 4.0);
        const double err = std::abs(norm(s, indicator(s, 0.0, 1.0)) - exact);
        if (prev > 0.0) CHECK(std::log2(prev / err) >= 0.9);
        prev = err;
    }
}

TEST_CASE("point reads interpolate linearly") {
    const auto s = halfline_l1(weights::flat(), 0.1, 2.0);
    const auto f = s.sample([](double x) { return Complex(3.0 * x, 0.0); });
    CHECK(s.read(f, 0.55).value.real() == doctest::Approx(1.65));
    CHECK(s.read(f, 0.6).value.real() == doctest::Approx(1.8));
    CHECK(s.read(f, 2.5).outside);
}
