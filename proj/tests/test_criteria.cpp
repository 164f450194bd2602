#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "reclab/admissibility.hpp"
#include "reclab/criteria.hpp"
#include "reclab/error.hpp"
#include "reclab/family.hpp"

using namespace reclab;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error raised");
    return ErrorKind::Structural;
}

const DomainSpec kHalf = DomainSpec::half_line(1e3);
const DomainSpec kLine = DomainSpec::line(1e3);
const DomainSpec kPos = DomainSpec::open_box(0.0, DomainSpec::kInf, 1e3);

AdmissibilityCertificate certify(const WeightFunction& rho, const DomainSpec& d = kHalf) {
    return check_weight_admissible(rho, d, linspace(0.0, 50.0, 51), linspace(-5.0, 5.0, 11));
}

CriterionVerdict liminf(const WeightFunction& rho) { return liminf_criterion_halfline(rho, kHalf, certify(rho)); }

std::vector<double> grid(double step, double horizon) {
    std::vector<double> out;
    for (double t = step; t <= horizon + 1e-12; t += step) out.push_back(t);
    return out;
}

WeightFunction halved(const WeightFunction& rho) {
    return rho.scaled(rho.label() + "/2", [](double) { return 0.5; });
}

WeightFunction damped(const WeightFunction& rho) {
    return rho.scaled(rho.label() + "*e^-x", [](double x) { return std::exp(-x); })
        .with_constants(rho.M(), rho.omega() + 1.0);
}

// int_1^2 e^t / (1 + x e^t)^3 dx
double dilation_mass(double t) {
    const double a = 1.0 + std::exp(t);
    const double b = 1.0 + 2.0 * std::exp(t);
    return 0.5 * (1.0 / (a * a) - 1.0 / (b * b));
}

} // namespace

TEST_CASE("lim inf criterion on the half-line") {
    CHECK(liminf(weights::exp_decay()).holds);
    CHECK_FALSE(liminf(weights::flat()).holds);

    const auto osc = liminf(weights::oscillating_decay());
    CHECK(osc.holds);
    REQUIRE_FALSE(osc.evidence.empty());
    for (const auto& [x, v] : osc.evidence) CHECK(v <= 3.0 * std::exp(-x) * (1.0 + 1e-12));

    const auto rho = weights::exp_decay();
    const auto v = liminf(rho);
    CHECK(v.criterion == Criterion::LimInfHalfLine);
    CHECK(v.horizon == 1e3);
    for (const auto& [x, m] : v.evidence) CHECK(m == doctest::Approx(std::exp(-(x + 1.0))).epsilon(1e-9));

    AdmissibilityCertificate missing;
    CHECK(kind_of([&] { liminf_criterion_halfline(rho, kHalf, missing); }) == ErrorKind::Precondition);
    CHECK(kind_of([&] { liminf_criterion_halfline(rho, kLine, certify(rho)); }) == ErrorKind::Precondition);
}

TEST_CASE("pointwise decay on the line") {
    const std::vector<double> xs{-2.0, 0.0, 0.5, 3.0};
    const auto sym = pointwise_decay_criterion_line(weights::symmetric_exp(), kLine, xs, Direction::Both);
    CHECK(sym.holds);
    CHECK(sym.direction == Direction::Both);
    CHECK_FALSE(pointwise_decay_criterion_line(weights::flat(), kLine, xs, Direction::Both).holds);

    const auto one = weights::one_sided_exp();
    CHECK(pointwise_decay_criterion_line(one, kLine, xs, Direction::Forward).holds);
    CHECK_FALSE(pointwise_decay_criterion_line(one, kLine, xs, Direction::Backward).holds);
    const auto both = pointwise_decay_criterion_line(one, kLine, xs, Direction::Both);
    CHECK_FALSE(both.holds);
    CHECK(both.diagnostics.at("forward_holds") == 1.0);
    CHECK(both.diagnostics.at("backward_holds") == 0.0);
}

TEST_CASE("mass curves") {
    const auto d = DomainSpec::half_line(200.0);
    const auto phi = semiflows::translation(d);
    const std::vector<double> ts{0.0, 0.5, 1.0, 3.0, 10.0};
    const CompactBox k01{0.0, 1.0};

    SUBCASE("closed form under exponential decay") {
        const auto c = lp_mass_curve(weights::exp_decay(), phi, k01, ts);
        CHECK(c.orientation == MassOrientation::ForwardImage);
        for (std::size_t i = 0; i < ts.size(); ++i) {
            CHECK(c.masses[i] >= 0.0);
            CHECK(c.masses[i] == doctest::Approx(std::exp(-ts[i]) * (1.0 - std::exp(-1.0))).epsilon(1e-6));
        }
    }
    SUBCASE("flat weight keeps |K|") {
        const auto c = lp_mass_curve(weights::flat(), phi, k01, ts);
        for (double m : c.masses) CHECK(std::abs(m - 1.0) <= 1e-8);
    }
    SUBCASE("additive over adjacent compacts") {
        const CompactBox a{0.0, 1.0};
        const CompactBox b{1.0, 2.5};
        const CompactBox ab{0.0, 2.5};
        for (const auto& rho : {weights::exp_decay(), weights::oscillating_decay(), weights::flat()}) {
            const auto ma = lp_mass_curve(rho, phi, a, ts);
            const auto mb = lp_mass_curve(rho, phi, b, ts);
            const auto mab = lp_mass_curve(rho, phi, ab, ts);
            for (std::size_t i = 0; i < ts.size(); ++i) {
                CHECK(std::abs(mab.masses[i] - ma.masses[i] - mb.masses[i]) <= 1e-8);
            }
        }
    }
    SUBCASE("dilation against the closed form") {
        const CompactBox k12{1.0, 2.0};
        const auto c = lp_mass_curve(weights::inverse_power(3.0), semiflows::dilation(kPos), k12, ts);
        for (std::size_t i = 0; i < ts.size(); ++i) {
            CHECK(c.masses[i] == doctest::Approx(dilation_mass(ts[i])).epsilon(1e-6));
        }
    }
    SUBCASE("a singular Jacobian excludes points") {
        Semiflow::Parts parts;
        parts.name = "pinched";
        parts.domain = d;
        parts.forward = [](double t, double x) { return x + t; };
        parts.inverse_on_image = [](double t, double y) -> std::optional<double> { return y - t; };
        parts.jac_det = [](double t, double x) { return (t > 0.0 && x < 0.25) ? 0.0 : 1.0; };
        parts.image_indicator = [](double t, double y) { return y >= t; };
        const std::vector<double> one{1.0};
        const auto c = lp_mass_curve(weights::flat(), Semiflow(parts), k01, one);
        CHECK(c.excluded_points > 0);
        CHECK(c.masses[0] == doctest::Approx(0.75).epsilon(1e-3));
    }
}

TEST_CASE("Lp semiflow criterion") {
    const auto d = DomainSpec::half_line(200.0);
    const std::vector<CompactBox> ks{{0.0, 1.0}};
    const auto ts = grid(1.0, 100.0);
    const auto dec = lp_semiflow_criterion(weights::exp_decay(), semiflows::translation(d), ks, ts);
    CHECK(dec.holds);
    CHECK(dec.diagnostics.at("refined_holds") == 1.0);
    CHECK_FALSE(lp_semiflow_criterion(weights::flat(), semiflows::translation(d), ks, ts).holds);

    const std::vector<CompactBox> k12{{1.0, 2.0}};
    const auto dil = lp_semiflow_criterion(weights::inverse_power(3.0), semiflows::dilation(kPos), k12, ts);
    CHECK(dil.holds);
    for (const auto& [t, m] : dil.evidence) CHECK(m == doctest::Approx(dilation_mass(t)).epsilon(1e-6));
}

TEST_CASE("C0 sup curves and criterion") {
    const auto ts = grid(1.0, 60.0);
    SUBCASE("translation with exponential decay") {
        const auto d = DomainSpec::half_line(200.0);
        const auto phi = semiflows::translation(d);
        const auto c = c0_sup_curves(weights::exp_decay(), phi, {0.0, 1.0}, ts);
        for (std::size_t i = 0; i < ts.size(); ++i) {
            if (ts[i] > 1.0) CHECK(c.s_pre[i] == 0.0);
            CHECK(c.s_img[i] == doctest::Approx(std::exp(-ts[i])).epsilon(1e-9));
        }
        const std::vector<CompactBox> ks{{0.0, 1.0}};
        CHECK(c0_semiflow_criterion(weights::exp_decay(), phi, ks, ts).holds);
        CHECK_FALSE(c0_semiflow_criterion(weights::flat(), phi, ks, ts).holds);
    }
    SUBCASE("dilation with rational hump") {
        const auto phi = semiflows::dilation(kPos);
        const auto rho = weights::rational_hump();
        const auto c = c0_sup_curves(rho, phi, {1.0, 2.0}, ts);
        for (std::size_t i = 0; i < ts.size(); ++i) {
            CHECK(c.s_pre[i] == doctest::Approx(rho(2.0 * std::exp(-ts[i]))).epsilon(1e-9));
            if (std::exp(ts[i]) <= 1e3) CHECK(c.s_img[i] == doctest::Approx(rho(std::exp(ts[i]))).epsilon(1e-9));
        }
        const std::vector<CompactBox> ks{{1.0, 2.0}};
        CHECK(c0_semiflow_criterion(rho, phi, ks, ts).holds);
    }
    SUBCASE("weights vanishing on K are rejected") {
        const std::vector<CompactBox> ks{{0.0, 1.0}};
        const WeightFunction dip("dip", [](double x) { return x * x; }, 1.0, 1.0);
        CHECK(kind_of([&] {
                  c0_semiflow_criterion(dip, semiflows::translation(DomainSpec::half_line(200.0)), ks, ts);
              }) == ErrorKind::Precondition);
    }
}

TEST_CASE("weighted Jacobian criteria") {
    const auto ts = grid(1.0, 200.0);
    const std::vector<double> xs{-1.0, 0.0, 2.0};
    const auto tr = semiflows::translation(kLine);
    CHECK(weighted_jacobian_criterion_lp(weights::symmetric_exp(), tr, xs, ts).holds);
    CHECK_FALSE(weighted_jacobian_criterion_lp(weights::flat(), tr, xs, ts).holds);
    CHECK(weighted_jacobian_criterion_c0(weights::symmetric_exp(), tr, xs, ts).holds);
    CHECK_FALSE(weighted_jacobian_criterion_c0(weights::flat(), tr, xs, ts).holds);

    const std::vector<double> pos{0.5, 1.0, 3.0};
    const auto dil = semiflows::dilation(kPos);
    const auto lp = weighted_jacobian_criterion_lp(weights::inverse_power(3.0), dil, pos, ts);
    CHECK(lp.holds);
    // Evidence is (x, min over t of rho(x e^{-t}) e^{-t}).
    for (const auto& [x, v] : lp.evidence) {
        double m = std::numeric_limits<double>::infinity();
        for (double t : ts) m = std::min(m, std::pow(1.0 + x * std::exp(-t), -3.0) * std::exp(-t));
        CHECK(v == doctest::Approx(m).epsilon(1e-9));
    }
    const std::vector<double> one{1.0};
    const auto c0 = weighted_jacobian_criterion_c0(weights::rational_hump(), dil, one, ts);
    CHECK(c0.holds);
    CHECK(c0.note.find("assumed") != std::string::npos);

    // Half-line translation is no group and has no condition (D) certificate here.
    const auto half = semiflows::translation(DomainSpec::half_line(200.0));
    CHECK(kind_of([&] { weighted_jacobian_criterion_lp(weights::exp_decay(), half, pos, ts); }) ==
          ErrorKind::CriterionUnavailable);
}

TEST_CASE("discrete spectrum criterion") {
    const auto cs = WeightedGridSpace::coordinates(2);
    const auto ts = grid(1.0, 100.0);
    const auto rational = make_diagonal_family(cs, {2.0 * std::numbers::pi, 4.0 * std::numbers::pi});
    CHECK(discrete_spectrum_criterion(rational, ts).holds);
    const auto off = make_diagonal_family(cs, {1.0, 2.0});
    CHECK_FALSE(discrete_spectrum_criterion(off, ts).holds);
}

TEST_CASE("smaller weights only turn verdicts into holds") {
    const std::vector<WeightFunction> bases{weights::flat(), weights::exp_decay(), weights::one_sided_exp(),
                                            weights::oscillating_decay()};
    const std::vector<double> xs{-1.0, 0.0, 2.0};
    const auto ts = grid(1.0, 200.0);
    const std::vector<CompactBox> ks{{0.0, 1.0}};
    const auto half = semiflows::translation(DomainSpec::half_line(1e3));
    for (const auto& rho : bases) {
        CAPTURE(rho.label());
        const auto verdicts = [&](const WeightFunction& w) {
            return std::vector<bool>{
                liminf(w).holds,
                lp_semiflow_criterion(w, half, ks, ts).holds,
                c0_semiflow_criterion(w, half, ks, ts).holds,
            };
        };
        const auto base = verdicts(rho);
        for (const auto& smaller : {halved(rho), damped(rho)}) {
            const auto v = verdicts(smaller);
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (base[i]) CHECK(v[i]);
            }
        }
    }
    // Pointwise decay on the line, where e^{-x} is not a smaller weight; use rho/2 and rho e^{-|x|}.
    for (const auto& rho : {weights::flat(), weights::one_sided_exp(), weights::symmetric_exp()}) {
        for (const auto dir : {Direction::Forward, Direction::Backward, Direction::Both}) {
            const bool base = pointwise_decay_criterion_line(rho, kLine, xs, dir).holds;
            const auto damp = rho.scaled("damped", [](double x) { return std::exp(-std::abs(x)); });
            if (base) {
                CHECK(pointwise_decay_criterion_line(halved(rho), kLine, xs, dir).holds);
                CHECK(pointwise_decay_criterion_line(damp, kLine, xs, dir).holds);
            }
        }
    }
}

TEST_CASE("cross-validation") {
    const auto space =
        WeightedGridSpace::with_spacing(DomainSpec::half_line(200.0), 0.01, NormMode::lp(1.0), weights::exp_decay());
    const auto fam = make_translation_family(space);
    const auto x0 = indicator(space, 0.0, 1.0);
    const auto crit = liminf(weights::exp_decay());
    const auto built = nested_ball_construct(PullbackOracle(fam), x0, 0.5, 6);

    SUBCASE("criterion and construction agree") {
        const auto rec = cross_validate(crit, built.report);
        CHECK(rec.status == ConsistencyStatus::Agree);
        CHECK_FALSE(rec.is_error());
    }
    SUBCASE("no criterion and no witness agree") {
        const auto flat_space = WeightedGridSpace::with_spacing(DomainSpec::half_line(200.0), 0.01,
                                                                NormMode::lp(1.0), weights::flat());
        const auto scan = direct_scan(make_translation_family(flat_space), indicator(flat_space, 0.0, 1.0),
                                      integer_times(1, 1000), 0.5);
        CHECK(cross_validate(liminf(weights::flat()), scan).status == ConsistencyStatus::Agree);
    }
    SUBCASE("tampered detector tolerance") {
        RecurrenceReport tampered = built.report;
        tampered.tol = -std::numeric_limits<double>::infinity();
        tampered = finalize_report(fam, built.y, tampered);
        CHECK(tampered.witness_times.empty());
        const auto rec = cross_validate(crit, tampered);
        CHECK(rec.status == ConsistencyStatus::CriterionYesDetectorNo);
        CHECK_FALSE(rec.is_error());
        CHECK_FALSE(rec.criterion_evidence.empty());
    }
    SUBCASE("a detector contradicting a failing criterion is an error") {
        const auto rec = cross_validate(liminf(weights::flat()), built.report);
        CHECK(rec.status == ConsistencyStatus::CriterionNoDetectorYes);
        CHECK(rec.is_error());
        CHECK(rec.criterion_evidence.size() == liminf(weights::flat()).evidence.size());
        CHECK(rec.witness_times == built.report.witness_times);
        CHECK(rec.witness_residuals == built.report.residuals);
    }
    SUBCASE("truncation-limited counts as no witness") {
        RecurrenceReport r;
        r.verdict = Verdict::TruncationLimited;
        CHECK(cross_validate(liminf(weights::flat()), r).status == ConsistencyStatus::Agree);
        CHECK(cross_validate(crit, r).status == ConsistencyStatus::CriterionYesDetectorNo);
    }
}
