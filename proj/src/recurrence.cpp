#include "reclab/recurrence.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

namespace reclab {

const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::WitnessFound: return "WitnessFound";
    case Verdict::NoWitnessInRange: return "NoWitnessInRange";
    case Verdict::TruncationLimited: return "TruncationLimited";
    }
    return "?";
}

const char* to_string(DetectorMethod m) {
    switch (m) {
    case DetectorMethod::DirectScan: return "DirectScan";
    case DetectorMethod::NestedBall: return "NestedBall";
    case DetectorMethod::GDelta: return "GDelta";
    }
    return "?";
}

double residual(const OperatorFamily& family, const GridFunction& f, double t) {
    return distance(family.space(), family.apply(t, f), f);
}

std::size_t dyadic_scales(std::span<const double> times) {
    std::set<long long> scales;
    for (double t : times) {
        double a = std::abs(t);
        if (a > 0.0) scales.insert(static_cast<long long>(std::floor(std::log2(a))));
    }
    return scales.size();
}

Verdict classify(std::span<const double> witness_times, bool truncated) {
    if (witness_times.size() >= 3 && dyadic_scales(witness_times) >= 3) return Verdict::WitnessFound;
    return truncated ? Verdict::TruncationLimited : Verdict::NoWitnessInRange;
}

RecurrenceReport finalize_report(const OperatorFamily& family, const GridFunction& f,
                                 RecurrenceReport draft) {
    std::vector<double> times;
    std::vector<double> residuals;
    for (double t : draft.witness_times) {
        GridFunction moved = family.apply(t, f);
        double r = distance(family.space(), moved, f);
        draft.truncated = draft.truncated || moved.truncated();
        if (r < draft.tol) {
            times.push_back(t);
            residuals.push_back(r);
        }
    }
    draft.witness_times = std::move(times);
    draft.residuals = std::move(residuals);
    draft.verdict = classify(draft.witness_times, draft.truncated);
    return draft;
}

RecurrenceReport direct_scan(const OperatorFamily& family, const GridFunction& f,
                             std::span<const double> time_grid, double tol) {
    RecurrenceReport draft;
    draft.method = DetectorMethod::DirectScan;
    draft.tol = tol;
    double prev = -std::numeric_limits<double>::infinity();
    for (double t : time_grid) {
        if (!(t > prev)) throw Error(ErrorKind::Structural, "time grid must be strictly increasing");
        prev = t;
        GridFunction moved = family.apply(t, f);
        draft.truncated = draft.truncated || moved.truncated();
        if (distance(family.space(), moved, f) < tol) draft.witness_times.push_back(t);
        draft.horizon = std::max(draft.horizon, std::abs(t));
    }
    draft.parameters["grid_size"] = static_cast<double>(time_grid.size());
    return finalize_report(family, f, std::move(draft));
}

std::vector<double> integer_times(long long first, long long last, long long stride) {
    std::vector<double> out;
    for (long long n = first; n <= last; n += stride) out.push_back(static_cast<double>(n));
    return out;
}

// ---------------------------------------------------------------- oracle

namespace {

Semiflow require_semiflow(const OperatorFamily& family) {
    if ((family.kind() != FamilyKind::Translation && family.kind() != FamilyKind::Composition) ||
        !family.semiflow()) {
        throw Error(ErrorKind::OracleUnavailable,
                    "pullback oracle needs a translation or composition family");
    }
    return *family.semiflow();
}

} // namespace

PullbackOracle::PullbackOracle(OperatorFamily family)
    : family_(std::move(family)), phi_(require_semiflow(family_)) {}

GridFunction PullbackOracle::pullback(const GridFunction& f, double t) const {
    const auto& space = family_.space();
    space.require_member(f);
    const auto ys = space.points();
    std::vector<Complex> out(ys.size());
    for (std::size_t i = 0; i < ys.size(); ++i) {
        if (!phi_.in_image(t, ys[i])) continue;
        auto pre = phi_.inverse_on_image(t, ys[i]);
        if (!pre) {
            throw Error(ErrorKind::OracleUnavailable,
                        "inverse of " + phi_.name() + " unavailable at y=" + std::to_string(ys[i]));
        }
        out[i] = space.read(f, *pre).value;
    }
    return GridFunction(space.id(), std::move(out), f.truncated());
}

TransitivityWitness evaluate_pullback(const PullbackOracle& oracle, const GridFunction& center, double t) {
    const auto& space = oracle.family().space();
    TransitivityWitness w;
    w.t = t;
    w.g = center + oracle.pullback(center, t);
    w.in_ball_residual = distance(space, w.g, center);
    w.return_residual = distance(space, oracle.family().apply(t, w.g), center);
    return w;
}

std::optional<TransitivityWitness> PullbackOracle::operator()(const GridFunction& center, double eps,
                                                              double t) const {
    TransitivityWitness w = evaluate_pullback(*this, center, t);
    if (w.in_ball_residual < eps && w.return_residual < eps) return w;
    return std::nullopt;
}

std::optional<TransitivityWitness> pullback_witness_oracle(const OperatorFamily& family,
                                                           const GridFunction& center, double eps,
                                                           double t) {
    return PullbackOracle(family)(center, eps, t);
}

// ------------------------------------------------------------ nested balls

NestedBallResult nested_ball_construct(const PullbackOracle& oracle, const GridFunction& x0,
                                       double eps0, int stages, const NestedBallOptions& options) {
    if (!(eps0 > 0.0 && eps0 < 1.0)) throw Error(ErrorKind::Precondition, "eps0 must lie in (0, 1)");
    if (stages < 1) throw Error(ErrorKind::Precondition, "at least one stage is required");
    if (!(options.step > 0.0)) throw Error(ErrorKind::Precondition, "candidate step must be positive");
    if (!(options.accept_fraction > 0.0 && options.accept_fraction <= 1.0)) {
        throw Error(ErrorKind::Precondition, "accept_fraction must lie in (0, 1]");
    }
    const OperatorFamily& family = oracle.family();
    const auto& space = family.space();
    space.require_member(x0);
    const double max_time =
        options.max_time > 0.0 ? options.max_time : space.domain().window().width();

    NestedBallResult result;
    result.x0 = x0;
    result.eps0 = eps0;
    GridFunction center = x0;
    double eps_prev = eps0;
    double t_prev = 0.0;
    for (int n = 1; n <= stages; ++n) {
        std::optional<TransitivityWitness> found;
        for (long long k = 1;; ++k) {
            double t = t_prev + options.step * static_cast<double>(k);
            if (options.multiple_of > 0.0) {
                t = options.multiple_of * (std::floor(t_prev / options.multiple_of) + static_cast<double>(k));
            }
            if (t > max_time) break;
            found = oracle(center, options.accept_fraction * eps_prev, t);
            if (found) break;
        }
        if (!found) {
            throw ConstructionStalled("no accepted witness at stage " + std::to_string(n) +
                                          " up to t=" + std::to_string(max_time),
                                      result.stages);
        }
        NestedBallStage stage;
        stage.t = found->t;
        stage.in_ball_residual = found->in_ball_residual;
        stage.return_residual = found->return_residual;
        stage.lipschitz = family.norm_bound(found->t);
        // B(x_n, eps_n) inside B(x_{n-1}, eps_{n-1}), T(t_n) B(x_n, eps_n) inside
        // B(x_{n-1}, eps_{n-1}), eps_n < 2^{-n}.
        double bound = std::min((eps_prev - stage.in_ball_residual) / 2.0, std::ldexp(1.0, -n));
        if (stage.lipschitz > 0.0) {
            bound = std::min(bound, (eps_prev - stage.return_residual) / (2.0 * stage.lipschitz));
        }
        stage.eps = options.safety * bound;
        stage.x = found->g;
        result.stages.push_back(stage);
        center = std::move(found->g);
        eps_prev = stage.eps;
        t_prev = stage.t;
    }

    result.y = center;
    result.distance_to_x0 = distance(space, result.y, x0);
    bool ok = result.distance_to_x0 < eps0;
    bool truncated = false;
    double prev_eps = eps0;
    for (const auto& stage : result.stages) {
        GridFunction moved = family.apply(stage.t, result.y);
        truncated = truncated || moved.truncated();
        double r = distance(space, moved, result.y);
        result.stage_residuals.push_back(r);
        ok = ok && r <= 2.0 * prev_eps;
        prev_eps = stage.eps;
    }
    result.certified = ok;

    RecurrenceReport& rep = result.report;
    rep.method = DetectorMethod::NestedBall;
    rep.tol = 2.0 * eps0;
    rep.horizon = max_time;
    rep.truncated = truncated;
    for (std::size_t i = 0; i < result.stages.size(); ++i) {
        rep.witness_times.push_back(result.stages[i].t);
        rep.residuals.push_back(result.stage_residuals[i]);
    }
    rep.verdict = ok ? Verdict::WitnessFound
                     : (truncated ? Verdict::TruncationLimited : Verdict::NoWitnessInRange);
    rep.parameters["eps0"] = eps0;
    rep.parameters["stages"] = stages;
    rep.parameters["step"] = options.step;
    rep.parameters["multiple_of"] = options.multiple_of;
    rep.parameters["accept_fraction"] = options.accept_fraction;
    return result;
}

// ------------------------------------------------------------------ G-delta

std::vector<double> dyadic_rational_times(double horizon, int max_level, bool include_negative) {
    std::vector<double> out;
    for (int m = 0; m <= max_level; ++m) {
        const double denom = std::ldexp(1.0, m);
        const auto top = static_cast<long long>(std::floor(horizon * denom));
        for (long long p = 1; p <= top; ++p) {
            if (m > 0 && p % 2 == 0) continue;  // already listed at a coarser level
            const double q = static_cast<double>(p) / denom;
            if (!(q > 1.0)) continue;
            out.push_back(q);
            if (include_negative) out.push_back(-q);
        }
    }
    return out;
}

GDeltaResult gdelta_membership(const OperatorFamily& family, const GridFunction& x, int k_max,
                               std::span<const double> rational_times) {
    GDeltaResult r;
    r.min_residual = std::numeric_limits<double>::infinity();
    for (double q : rational_times) {
        if (!(std::abs(q) > 1.0)) continue;
        if (q < 0.0 && family.time_domain() == TimeDomain::Forward) continue;
        double res = residual(family, x, q);
        r.residual_curve.emplace_back(q, res);
        if (res < r.min_residual) {
            r.min_residual = res;
            r.argmin_time = q;
        }
    }
    bool all_so_far = true;
    for (int k = 1; k <= k_max; ++k) {
        bool passes = r.min_residual < 1.0 / static_cast<double>(k);
        r.levels.push_back({k, passes});
        all_so_far = all_so_far && passes;
        if (all_so_far) r.member_up_to = k;
    }
    return r;
}

// ---------------------------------------------------------------- rigidity

RigidityReport rigidity_scan(const OperatorFamily& family, std::span<const GridFunction> test_vectors,
                             std::span<const double> time_grid, double tol) {
    if (test_vectors.empty()) throw Error(ErrorKind::Precondition, "rigidity scan needs test vectors");
    RigidityReport rep;
    rep.kind = RigidityKind::Strong;
    rep.tol = tol;
    rep.best_residual = std::numeric_limits<double>::infinity();
    bool truncated = false;
    for (double t : time_grid) {
        double worst = 0.0;
        for (const auto& v : test_vectors) {
            GridFunction moved = family.apply(t, v);
            truncated = truncated || moved.truncated();
            worst = std::max(worst, distance(family.space(), moved, v));
        }
        rep.times.push_back(t);
        rep.residuals.push_back(worst);
        if (worst < tol) rep.near_return_times.push_back(t);
        if (worst < rep.best_residual) {
            rep.best_residual = worst;
            rep.best_time = t;
        }
    }
    rep.verdict = classify(rep.near_return_times, truncated);
    return rep;
}

RigidityReport uniform_rigidity_scan(const OperatorFamily& family, std::span<const double> time_grid,
                                     double tol, std::size_t cap) {
    const auto& space = family.space();
    if (space.size() > cap) {
        throw Error(ErrorKind::Size, "grid size " + std::to_string(space.size()) +
                                         " exceeds matrix cap " + std::to_string(cap));
    }
    RigidityReport rep;
    rep.kind = RigidityKind::Uniform;
    rep.tol = tol;
    rep.best_residual = std::numeric_limits<double>::infinity();
    for (double t : time_grid) {
        double value = operator_norm_estimate(assemble_matrix(space, family, t, cap).minus_identity());
        rep.times.push_back(t);
        rep.residuals.push_back(value);
        if (value < tol) rep.near_return_times.push_back(t);
        if (value < rep.best_residual) {
            rep.best_residual = value;
            rep.best_time = t;
        }
    }
    rep.verdict = classify(rep.near_return_times, false);
    return rep;
}

} // namespace reclab
