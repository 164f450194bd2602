#include "reclab/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "json.hpp"
#include "reclab/operator_matrix.hpp"

#ifndef RECLAB_VERSION
#define RECLAB_VERSION "dev"
#endif

namespace reclab {

using nlohmann::json;

std::string software_version() { return RECLAB_VERSION; }

std::vector<double> time_grid(double step, double horizon) {
    if (!(step > 0.0) || !(horizon > 0.0)) throw Error(ErrorKind::Precondition, "time grid needs step, horizon > 0");
    std::vector<double> out;
    const auto n = static_cast<long long>(std::floor(horizon / step + 1e-9));
    out.reserve(static_cast<std::size_t>(std::max(0LL, n)));
    for (long long k = 1; k <= n; ++k) out.push_back(static_cast<double>(k) * step);
    return out;
}

namespace {

DomainSpec make_domain(const SpaceConfig& s) {
    if (s.domain == "half_line") return DomainSpec::half_line(s.trunc);
    if (s.domain == "line") return DomainSpec::line(s.trunc);
    return DomainSpec::open_box(s.low, s.high, s.trunc);
}

GridFunction make_vector(const WeightedGridSpace& space, const TestVectorConfig& tv) {
    if (tv.kind == "indicator") return indicator(space, tv.a, tv.b);
    if (tv.kind == "bump") return smooth_bump(space, tv.a, tv.b);
    if (tv.kind == "hat") return hat(space, tv.a, tv.b);
    if (tv.kind == "basis") {
        if (tv.index >= space.size()) throw Error(ErrorKind::Validation, "test_vector.index out of range");
        return space.basis(tv.index);
    }
    if (tv.values.size() != space.size()) {
        throw Error(ErrorKind::Validation, "test_vector.values needs " + std::to_string(space.size()) + " entries");
    }
    return space.from_values(std::vector<Complex>(tv.values.begin(), tv.values.end()));
}

} // namespace

BuiltInstance build_instance(const ExperimentConfig& cfg) {
    const NormMode mode = cfg.space.mode == "sup" ? NormMode::sup() : NormMode::lp(cfg.space.p);
    const FamilyConfig& fc = cfg.family;
    if (fc.kind == "diagonal") {
        auto space = WeightedGridSpace::coordinates(fc.frequencies.size(), mode);
        auto family = make_diagonal_family(space, fc.frequencies);
        auto v = make_vector(space, cfg.analysis.test_vector);
        return BuiltInstance{space, std::nullopt, std::nullopt, std::nullopt, family, v, v, std::nullopt};
    }
    const DomainSpec domain = make_domain(cfg.space);
    const WeightFunction weight = weights::make(cfg.weight.name, cfg.weight.params);
    const WeightedGridSpace space = cfg.space.grid_points > 0
                                        ? WeightedGridSpace::uniform(domain, cfg.space.grid_points, mode, weight)
                                        : WeightedGridSpace::with_spacing(domain, cfg.space.spacing, mode, weight);
    const Semiflow phi = fc.semiflow.empty() ? semiflows::translation(domain)
                                             : semiflows::make(fc.semiflow, fc.semiflow_params, domain);
    const OperatorFamily base =
        fc.semiflow.empty() ? make_translation_family(space) : make_composition_family(space, phi);
    const GridFunction v = make_vector(space, cfg.analysis.test_vector);

    if (fc.kind == "direct_sum") {
        auto sum = direct_sum(base, base);
        GridFunction second = v;
        second *= Complex(0.0, 0.5);
        auto joined = sum.space().join(v, second);
        return BuiltInstance{space, weight, phi, base, sum, joined, v, std::nullopt};
    }
    if (fc.kind == "rotated") {
        const RationalRotation r{fc.rotation->p, fc.rotation->q};
        auto fam = rotate_family(base, r.value());
        return BuiltInstance{space, weight, phi, base, fam, v, v, time_discretize(base, fc.t0).rotated(r)};
    }
    if (fc.kind == "discretized") {
        return BuiltInstance{space, weight, phi, base, base, v, v, time_discretize(base, fc.t0)};
    }
    return BuiltInstance{space, weight, phi, base, base, v, v, std::nullopt};
}

namespace {

std::vector<CompactBox> boxes(const AnalysisConfig& a) {
    std::vector<CompactBox> out;
    for (const auto& [lo, hi] : a.compacts) out.push_back({lo, hi});
    return out;
}

class Pipeline {
public:
    Pipeline(const ExperimentConfig& cfg, RunRecord& rec) : cfg_(cfg), a_(cfg.analysis), rec_(rec), b_(build_instance(cfg)) {}

    void execute() {
        const bool xval = requests(a_, "cross_validate");
        if (requests(a_, "admissibility") || (criterion_name() == "liminf" && (requests(a_, "criterion") || xval))) {
            admissibility();
        }
        if (requests(a_, "criterion") || xval) criterion();
        if (requests(a_, "nested_ball") || (xval && a_.detector == "nested_ball")) nested_ball();
        if (requests(a_, "direct_scan") || (xval && a_.detector == "direct_scan")) direct_scan();
        if (requests(a_, "gdelta")) gdelta();
        if (requests(a_, "rigidity")) rigidity();
        if (requests(a_, "uniform_rigidity")) uniform_rigidity();
        if (requests(a_, "spectrum")) spectrum();
        if (xval) cross_validation();
        spectral_consistency();
    }

private:
    void row(const std::string& analysis, const std::string& quantity, std::optional<double> t, double value,
             double tol, double horizon, bool truncated, const std::string& method) {
        rec_.rows.push_back({cfg_.name, analysis, quantity, t, value, tol, horizon, truncated, method});
    }

    bool translation_flow() const { return b_.phi && b_.phi->name() == "translation"; }

    std::string criterion_name() const {
        if (a_.criterion != "auto") return a_.criterion;
        if (cfg_.family.kind == "diagonal") return "discrete_spectrum";
        if (translation_flow() && cfg_.space.domain == "half_line") return "liminf";
        if (translation_flow() && cfg_.space.domain == "line") return "pointwise";
        return cfg_.space.mode == "sup" ? "c0_sup" : "lp_mass";
    }

    void admissibility() {
        if (!b_.weight) {
            rec_.notes.push_back("admissibility: not applicable to diagonal families");
            return;
        }
        const WeightFunction& rho = *b_.weight;
        const DomainSpec& d = b_.space.domain();
        const Interval w = d.window();
        std::vector<double> xs;
        if (d.kind() == DomainKind::OpenBox && w.low == 0.0) {
            xs = geomspace(1e-4, w.high, 241);
        } else {
            xs = linspace(d.low_is_closed() ? w.low : w.low + 1e-6 * w.width(), w.high, 241);
        }
        AdmissibilityCertificate cert;
        if (translation_flow()) {
            auto shifts = linspace(0.0, std::min(20.0, w.width()), 41);
            if (d.kind() == DomainKind::Line) {
                auto neg = linspace(-std::min(20.0, w.width()), 0.0, 41);
                shifts.insert(shifts.end(), neg.begin(), neg.end() - 1);
            }
            cert = check_weight_admissible(rho, d, xs, shifts);
        } else {
            const auto ts = linspace(0.0, 10.0, 41);
            if (cfg_.space.mode == "sup") {
                const auto ks = boxes(a_);
                cert = check_c0_semiflow_admissible(rho, *b_.phi, d, ts, xs, ks, rho.M(), rho.omega());
            } else {
                cert = check_lp_semiflow_admissible(rho, *b_.phi, d, ts, xs, rho.M(), rho.omega());
            }
        }
        const std::string method = std::string("admissibility:") + to_string(cert.kind);
        row("admissibility", "worst_ratio", cert.witness_time, cert.worst_ratio, kAdmissibilityTol, 0.0, false, method);
        row("admissibility", "holds", std::nullopt, cert.holds ? 1.0 : 0.0, kAdmissibilityTol, 0.0, false, method);
        rec_.certificates.push_back(cert);
        if (!cert.holds) {
            throw Error(ErrorKind::Precondition,
                        "weight " + rho.label() + " failed " + to_string(cert.kind) + " admissibility (worst ratio " +
                            std::to_string(cert.worst_ratio) + ")");
        }
    }

    void criterion() {
        const std::string name = criterion_name();
        const CriterionOptions opts{a_.criterion_tol, a_.criterion_horizon, 3};
        const auto times = time_grid(a_.criterion_time_step, a_.criterion_horizon);
        const auto ks = boxes(a_);
        auto need_weight = [&]() -> const WeightFunction& {
            if (!b_.weight) throw Error(ErrorKind::Precondition, "criterion " + name + " needs a weight");
            return *b_.weight;
        };
        std::string quantity;
        CriterionVerdict v;
        if (name == "liminf") {
            const AdmissibilityCertificate* cert = nullptr;
            for (const auto& c : rec_.certificates) {
                if (c.kind == CertificateKind::ScalarWeight) cert = &c;
            }
            if (!cert) throw Error(ErrorKind::Precondition, "lim inf criterion needs a weight admissibility certificate");
            v = liminf_criterion_halfline(need_weight(), b_.space.domain(), *cert, opts);
            quantity = "window_min_rho";
        } else if (name == "pointwise") {
            const Direction dir = a_.direction == "forward"    ? Direction::Forward
                                  : a_.direction == "backward" ? Direction::Backward
                                                               : Direction::Both;
            v = pointwise_decay_criterion_line(need_weight(), b_.space.domain(), a_.x_samples, dir, opts);
            quantity = "min_rho_shifted";
        } else if (name == "lp_mass") {
            v = lp_semiflow_criterion(need_weight(), *b_.phi, ks, times, opts);
            quantity = "forward_image_mass";
        } else if (name == "c0_sup") {
            v = c0_semiflow_criterion(need_weight(), *b_.phi, ks, times, opts);
            quantity = "max_sup_pre_img";
        } else if (name == "jacobian_lp" || name == "jacobian_c0") {
            std::optional<AdmissibilityCertificate> cond;
            if (!b_.phi->group_like()) {
                const auto xs = linspace(ks.front().low, ks.back().high, 65);
                cond = check_condition_D(*b_.phi, ks, times, xs);
                rec_.certificates.push_back(*cond);
            }
            const auto* c = cond ? &*cond : nullptr;
            v = name == "jacobian_lp" ? weighted_jacobian_criterion_lp(need_weight(), *b_.phi, a_.x_samples, times, opts, c)
                                      : weighted_jacobian_criterion_c0(need_weight(), *b_.phi, a_.x_samples, times, opts, c);
            quantity = name == "jacobian_lp" ? "rho_jacobian_backward" : "rho_backward";
        } else {
            v = discrete_spectrum_criterion(b_.family, times, opts);
            quantity = "max_phase_gap";
        }
        const std::string method = std::string("criterion:") + to_string(v.criterion);
        for (const auto& [t, value] : v.evidence) row("criterion", quantity, t, value, v.tol, v.horizon, false, method);
        row("criterion", "holds", std::nullopt, v.holds ? 1.0 : 0.0, v.tol, v.horizon, false, method);
        if (!v.note.empty()) rec_.notes.push_back(std::string("criterion ") + to_string(v.criterion) + ": " + v.note);
        rec_.criterion = std::move(v);
    }

    NestedBallOptions ball_options() const {
        NestedBallOptions o;
        o.step = a_.candidate_step;
        o.max_time = a_.max_time;
        o.accept_fraction = a_.accept_fraction;
        if (b_.discrete) {
            const long long q = cfg_.family.rotation ? cfg_.family.rotation->q : 1;
            o.multiple_of = cfg_.family.t0 * static_cast<double>(q);
            o.step = o.multiple_of;
        }
        return o;
    }

    RecurrenceReport construct(const OperatorFamily& fam, const std::string& label,
                               std::optional<NestedBallResult>& keep) {
        const NestedBallOptions o = ball_options();
        const double horizon = o.max_time > 0.0 ? o.max_time : fam.space().domain().window().width();
        try {
            NestedBallResult res = nested_ball_construct(PullbackOracle(fam), b_.base_vector, a_.eps0, a_.stages, o);
            double prev = a_.eps0;
            for (std::size_t i = 0; i < res.stages.size(); ++i) {
                const auto& s = res.stages[i];
                const std::string m = "detector:NestedBall";
                row(label, "stage_eps", s.t, s.eps, 0.0, horizon, false, m);
                row(label, "stage_residual", s.t, res.stage_residuals[i], 2.0 * prev, horizon, res.report.truncated, m);
                row(label, "in_ball_residual", s.t, s.in_ball_residual, prev, horizon, false, m);
                row(label, "return_residual", s.t, s.return_residual, prev, horizon, false, m);
                row(label, "lipschitz", s.t, s.lipschitz, 0.0, horizon, false, m);
                prev = s.eps;
            }
            row(label, "distance_to_x0", std::nullopt, res.distance_to_x0, a_.eps0, horizon, false, "detector:NestedBall");
            row(label, "certified", std::nullopt, res.certified ? 1.0 : 0.0, a_.eps0, horizon, res.report.truncated,
                "detector:NestedBall");
            RecurrenceReport rep = res.report;
            keep = std::move(res);
            return rep;
        } catch (const ConstructionStalled& e) {
            RecurrenceReport rep;
            rep.method = DetectorMethod::NestedBall;
            rep.verdict = Verdict::NoWitnessInRange;
            rep.tol = 2.0 * a_.eps0;
            rep.horizon = horizon;
            rep.parameters["stalled_at_stage"] = static_cast<double>(e.partial_stages().size() + 1);
            rec_.notes.push_back(label + ": " + e.what());
            row(label, "stalled_at_stage", std::nullopt, static_cast<double>(e.partial_stages().size() + 1),
                2.0 * a_.eps0, horizon, false, "detector:NestedBall");
            return rep;
        }
    }

    void nested_ball() {
        if (!b_.base) {
            rec_.notes.push_back("nested_ball: no pullback oracle for " + cfg_.family.kind + " families");
            return;
        }
        RecurrenceReport rep = construct(*b_.base, "nested_ball", rec_.construction);
        if (rec_.construction && cfg_.family.kind == "direct_sum") {
            // (y, i y / 2) under T (+) T at the constructed times
            const GridFunction& y = rec_.construction->y;
            GridFunction second = y;
            second *= Complex(0.0, 0.5);
            RecurrenceReport draft = rep;
            draft.tol = 2.0 * a_.eps0;
            rep = finalize_report(b_.family, b_.family.space().join(y, second), draft);
        } else if (rec_.construction && b_.discrete) {
            // the same comb seen through the single operator lambda T(t0)
            const GridFunction& y = rec_.construction->y;
            bool ok = rep.verdict == Verdict::WitnessFound;
            double prev = a_.eps0;
            for (std::size_t i = 0; i < rep.witness_times.size(); ++i) {
                const auto n = std::llround(rep.witness_times[i] / b_.discrete->t0());
                const auto it = b_.discrete->iterate(n, y);
                const double r = distance(b_.space, it.value, y);
                rep.residuals[i] = r;
                ok = ok && r <= 2.0 * prev;
                prev = rec_.construction->stages[i].eps;
                row("nested_ball", "iterate_residual", static_cast<double>(n), r, rep.tol, rep.horizon,
                    it.value.truncated(), "detector:NestedBall");
            }
            if (!ok && rep.verdict == Verdict::WitnessFound) rep.verdict = Verdict::NoWitnessInRange;
        }
        rec_.detectors.push_back({"nested_ball", rep});
        if (a_.backward) {
            if (!b_.phi || !b_.phi->group_like()) {
                throw Error(ErrorKind::Precondition, "backward construction needs a group-like flow");
            }
            const OperatorFamily back = make_composition_family(b_.space, b_.phi->reversed());
            rec_.detectors.push_back(
                {"nested_ball_backward", construct(back, "nested_ball_backward", rec_.backward_construction)});
        }
    }

    void direct_scan() {
        const auto times = time_grid(a_.time_step, a_.detector_horizon);
        RecurrenceReport rep = reclab::direct_scan(b_.family, b_.test_vector, times, a_.detector_tol);
        rep.horizon = a_.detector_horizon;
        for (std::size_t i = 0; i < rep.witness_times.size(); ++i) {
            row("direct_scan", "witness_residual", rep.witness_times[i], rep.residuals[i], rep.tol, rep.horizon,
                rep.truncated, "detector:DirectScan");
        }
        row("direct_scan", "witness_count", std::nullopt, static_cast<double>(rep.witness_times.size()), rep.tol,
            rep.horizon, rep.truncated, "detector:DirectScan");
        rec_.detectors.push_back({"direct_scan", rep});
    }

    void gdelta() {
        const bool built = rec_.construction.has_value() && b_.base;
        const OperatorFamily& fam = built ? *b_.base : b_.family;
        const GridFunction& x = built ? rec_.construction->y : b_.test_vector;
        const auto qs = dyadic_rational_times(a_.gdelta_horizon, a_.gdelta_max_level,
                                              fam.time_domain() == TimeDomain::Group);
        GDeltaResult g = gdelta_membership(fam, x, a_.gdelta_k_max, qs);
        for (const auto& [q, r] : g.residual_curve) {
            row("gdelta", "residual", q, r, 0.0, a_.gdelta_horizon, false, "detector:GDelta");
        }
        row("gdelta", "member_up_to", std::nullopt, g.member_up_to, 0.0, a_.gdelta_horizon, false, "detector:GDelta");
        row("gdelta", "min_residual", g.argmin_time, g.min_residual, 0.0, a_.gdelta_horizon, false, "detector:GDelta");
        rec_.gdelta = std::move(g);
    }

    std::vector<GridFunction> test_vectors() const {
        std::vector<GridFunction> vs{b_.test_vector};
        const auto& space = b_.family.space();
        if (cfg_.family.kind == "diagonal") {
            for (std::size_t j = 0; j < space.size(); ++j) vs.push_back(space.basis(j));
        }
        std::mt19937_64 gen(a_.seed);
        for (int k = 0; k < a_.random_vectors; ++k) {
            std::vector<Complex> vals(space.size());
            for (auto& v : vals) {
                // top 53 bits to a double in [-1, 1)
                v = Complex(static_cast<double>(gen() >> 11) * 0x1.0p-52 - 1.0, 0.0);
            }
            vs.push_back(space.from_values(std::move(vals)));
        }
        return vs;
    }

    void rigidity() {
        const auto times = time_grid(a_.time_step, a_.detector_horizon);
        const auto vs = test_vectors();
        RigidityReport r = rigidity_scan(b_.family, vs, times, a_.rigidity_tol);
        for (std::size_t i = 0; i < r.times.size(); ++i) {
            row("rigidity", "max_residual", r.times[i], r.residuals[i], r.tol, a_.detector_horizon, false,
                "detector:StrongRigidity");
        }
        row("rigidity", "near_return_count", std::nullopt, static_cast<double>(r.near_return_times.size()), r.tol,
            a_.detector_horizon, false, "detector:StrongRigidity");
        rec_.rigidity.push_back(std::move(r));
    }

    void uniform_rigidity() {
        const auto times = time_grid(a_.time_step, a_.detector_horizon);
        RigidityReport r = uniform_rigidity_scan(b_.family, times, a_.rigidity_tol, a_.matrix_cap);
        for (std::size_t i = 0; i < r.times.size(); ++i) {
            row("uniform_rigidity", "norm_T_minus_I", r.times[i], r.residuals[i], r.tol, a_.detector_horizon, false,
                "detector:UniformRigidity");
        }
        row("uniform_rigidity", "near_return_count", std::nullopt, static_cast<double>(r.near_return_times.size()),
            r.tol, a_.detector_horizon, false, "detector:UniformRigidity");
        rec_.rigidity.push_back(std::move(r));
    }

    void spectrum() {
        const auto m = assemble_matrix(b_.family.space(), b_.family, a_.spectrum_t, a_.matrix_cap);
        const auto est = spectral_radius_estimate(m);
        row("spectrum", "spectral_radius", a_.spectrum_t, est.r, a_.spectrum_tol, 0.0, false,
            "spectrum:power_iteration");
        row("spectrum", "iterations", a_.spectrum_t, est.iterations, 0.0, 0.0, false, "spectrum:power_iteration");
        if (!b_.family.space().is_product()) {
            // r <= ||T(t)||; the truncated shift is nilpotent, so the norm is the informative bound
            row("spectrum", "operator_norm", a_.spectrum_t, operator_norm_estimate(m), 0.0, 0.0, false,
                "spectrum:operator_norm");
        }
        row("spectrum", "converged", a_.spectrum_t, est.converged ? 1.0 : 0.0, 0.0, 0.0, false,
            "spectrum:power_iteration");
        rec_.spectrum = est;
    }

    const DetectorOutcome* find(const std::string& label) const {
        for (const auto& d : rec_.detectors) {
            if (d.label == label) return &d;
        }
        return nullptr;
    }

    void cross_validation() {
        if (!rec_.criterion) return;
        const DetectorOutcome* primary = find(a_.detector);
        if (!primary) {
            rec_.notes.push_back("cross_validate: detector " + a_.detector + " produced no report");
            return;
        }
        RecurrenceReport rep = primary->report;
        if (a_.detector == "nested_ball") {
            if (const DetectorOutcome* back = find("nested_ball_backward")) {
                // both time directions are needed for the group claim
                if (back->report.verdict != Verdict::WitnessFound) rep.verdict = back->report.verdict;
            }
        }
        add_consistency(cross_validate(*rec_.criterion, rep), a_.detector);
        // any other witness-producing detector contradicts a failing criterion
        for (const auto& d : rec_.detectors) {
            if (d.label == a_.detector || rec_.criterion->holds || d.report.verdict != Verdict::WitnessFound) continue;
            add_consistency(cross_validate(*rec_.criterion, d.report), d.label);
        }
    }

    void add_consistency(ConsistencyRecord c, const std::string& label) {
        const double code = c.status == ConsistencyStatus::Agree                    ? 0.0
                            : c.status == ConsistencyStatus::CriterionYesDetectorNo ? 1.0
                                                                                     : 2.0;
        row("cross_validate", "status_" + label, std::nullopt, code, rec_.criterion->tol, rec_.criterion->horizon,
            false, std::string("cross_validate:") + to_string(c.status));
        rec_.consistency.push_back(std::move(c));
    }

    void spectral_consistency() {
        if (!rec_.spectrum) return;
        if (!(rec_.spectrum->r < 1.0 - 5.0 * a_.spectrum_tol)) return;
        for (const auto& d : rec_.detectors) {
            if (d.report.verdict == Verdict::WitnessFound) {
                rec_.spectral_consistent = false;
                rec_.notes.push_back("spectral radius " + std::to_string(rec_.spectrum->r) + " < 1 but " +
                                     d.label + " found witnesses");
            }
        }
    }

    const ExperimentConfig& cfg_;
    const AnalysisConfig& a_;
    RunRecord& rec_;
    BuiltInstance b_;
};

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json jnum(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

json jnums(const std::vector<double>& vs) {
    json a = json::array();
    for (double v : vs) a.push_back(jnum(v));
    return a;
}

json report_json(const std::string& label, const RecurrenceReport& r) {
    json params = json::object();
    for (const auto& [k, v] : r.parameters) params[k] = jnum(v);
    return {{"label", label},
            {"method", to_string(r.method)},
            {"verdict", to_string(r.verdict)},
            {"witness_times", jnums(r.witness_times)},
            {"residuals", jnums(r.residuals)},
            {"tol", jnum(r.tol)},
            {"horizon", jnum(r.horizon)},
            {"truncated", r.truncated},
            {"parameters", params}};
}

} // namespace

RunRecord run(const ExperimentConfig& config) {
    RunRecord rec;
    rec.instance = config.name;
    rec.config_hash = hex64(config_hash(config));
    rec.version = software_version();
    const auto start = std::chrono::steady_clock::now();
    try {
        auto problems = validate(config);
        if (!problems.empty()) throw ValidationError(std::move(problems));
        Pipeline(config, rec).execute();
        bool contradiction = !rec.spectral_consistent;
        for (const auto& c : rec.consistency) contradiction = contradiction || c.is_error();
        rec.exit_status = contradiction ? 2 : 0;
    } catch (const std::exception& e) {
        rec.error = e.what();
        rec.exit_status = 1;
    }
    rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!config.output.path.empty()) {
        try {
            write_reports(rec, config.output.path, config.output.format);
        } catch (const std::exception& e) {
            rec.error += std::string(rec.error.empty() ? "" : "; ") + "writing reports: " + e.what();
            rec.exit_status = 1;
        }
    }
    return rec;
}

std::string rows_to_csv(std::vector<ReportRow> rows) {
    std::stable_sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
        if (a.instance != b.instance) return a.instance < b.instance;
        if (a.analysis != b.analysis) return a.analysis < b.analysis;
        if (a.t_or_x.has_value() != b.t_or_x.has_value()) return !a.t_or_x.has_value();
        return a.t_or_x.has_value() && *a.t_or_x < *b.t_or_x;
    });
    std::string out = "instance,analysis,quantity,t_or_x,value,tol,horizon,truncated,method\n";
    for (const auto& r : rows) {
        out += r.instance + "," + r.analysis + "," + r.quantity + "," + (r.t_or_x ? fmt(*r.t_or_x) : "") + "," +
               fmt(r.value) + "," + fmt(r.tol) + "," + fmt(r.horizon) + "," + (r.truncated ? "1" : "0") + "," +
               r.method + "\n";
    }
    return out;
}

std::string summary_text(const RunRecord& rec, bool include_rows) {
    json j;
    j["instance"] = rec.instance;
    j["config_hash"] = rec.config_hash;
    j["version"] = rec.version;
    j["exit_status"] = rec.exit_status;
    j["error"] = rec.error;
    j["notes"] = rec.notes;
    json certs = json::array();
    for (const auto& c : rec.certificates) {
        certs.push_back({{"kind", to_string(c.kind)},
                         {"holds", c.holds},
                         {"worst_ratio", jnum(c.worst_ratio)},
                         {"samples_checked", c.samples_checked},
                         {"scope", c.scope}});
    }
    j["admissibility"] = certs;
    if (rec.criterion) {
        const auto& v = *rec.criterion;
        json diag = json::object();
        for (const auto& [k, x] : v.diagnostics) diag[k] = jnum(x);
        j["criterion"] = {{"name", to_string(v.criterion)}, {"holds", v.holds},      {"tol", jnum(v.tol)},
                          {"horizon", jnum(v.horizon)},     {"direction", to_string(v.direction)},
                          {"note", v.note},                 {"diagnostics", diag}};
    }
    json dets = json::array();
    for (const auto& d : rec.detectors) dets.push_back(report_json(d.label, d.report));
    j["detectors"] = dets;
    json cons = json::array();
    for (const auto& c : rec.consistency) {
        cons.push_back({{"status", to_string(c.status)},
                        {"criterion", to_string(c.criterion)},
                        {"criterion_holds", c.criterion_holds},
                        {"detector_method", to_string(c.detector_method)},
                        {"detector_verdict", to_string(c.detector_verdict)},
                        {"witness_times", jnums(c.witness_times)},
                        {"message", c.message}});
    }
    j["consistency"] = cons;
    j["spectral_consistent"] = rec.spectral_consistent;
    if (rec.spectrum) {
        j["spectrum"] = {{"radius", jnum(rec.spectrum->r)},
                         {"converged", rec.spectrum->converged},
                         {"iterations", rec.spectrum->iterations}};
    }
    if (rec.gdelta) j["gdelta"] = {{"member_up_to", rec.gdelta->member_up_to}, {"min_residual", jnum(rec.gdelta->min_residual)}};
    if (include_rows) {
        json rows = json::array();
        for (const auto& r : rec.rows) {
            rows.push_back({{"analysis", r.analysis},
                            {"quantity", r.quantity},
                            {"t_or_x", r.t_or_x ? jnum(*r.t_or_x) : json(nullptr)},
                            {"value", jnum(r.value)},
                            {"tol", jnum(r.tol)},
                            {"horizon", jnum(r.horizon)},
                            {"truncated", r.truncated},
                            {"method", r.method}});
        }
        j["rows"] = rows;
    }
    return j.dump(2) + "\n";
}

void write_reports(const RunRecord& rec, const std::string& dir, const std::string& format) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto write = [](const fs::path& p, const std::string& text) {
        std::ofstream out(p, std::ios::binary);
        if (!out) throw Error(ErrorKind::Validation, "cannot write " + p.string());
        out << text;
    };
    if (format == "structured") {
        write(fs::path(dir) / (rec.instance + ".json"), summary_text(rec, true));
    } else {
        write(fs::path(dir) / (rec.instance + ".csv"), rows_to_csv(rec.rows));
        write(fs::path(dir) / (rec.instance + ".summary.json"), summary_text(rec));
    }
}

} // namespace reclab
