#include "reclab/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace reclab {

const char* to_string(Criterion c) {
    switch (c) {
    case Criterion::LimInfHalfLine: return "LimInfHalfLine";
    case Criterion::PointwiseDecayLine: return "PointwiseDecayLine";
    case Criterion::LpSemiflowMass: return "LpSemiflowMass";
    case Criterion::C0SemiflowSup: return "C0SemiflowSup";
    case Criterion::WeightedJacobianLp: return "WeightedJacobianLp";
    case Criterion::WeightedJacobianC0: return "WeightedJacobianC0";
    case Criterion::DiscreteSpectrum: return "DiscreteSpectrum";
    }
    return "?";
}

const char* to_string(Direction d) {
    switch (d) {
    case Direction::Forward: return "Forward";
    case Direction::Backward: return "Backward";
    case Direction::Both: return "Both";
    case Direction::NotApplicable: return "NotApplicable";
    }
    return "?";
}

const char* to_string(MassOrientation o) {
    return o == MassOrientation::ForwardImage ? "ForwardImage" : "Preimage";
}

const char* to_string(ConsistencyStatus s) {
    switch (s) {
    case ConsistencyStatus::Agree: return "Agree";
    case ConsistencyStatus::CriterionYesDetectorNo: return "CriterionYesDetectorNo";
    case ConsistencyStatus::CriterionNoDetectorYes: return "CriterionNoDetectorYes";
    }
    return "?";
}

bool spans_scales(std::span<const double> times, std::size_t min_scales) {
    return dyadic_scales(times) >= min_scales;
}

namespace {

double checked(double v, const char* what) {
    if (std::isnan(v)) throw Error(ErrorKind::Numeric, std::string("NaN while evaluating ") + what);
    return v;
}

double weight_at(const WeightFunction& rho, double x) {
    return checked(rho.eval_unchecked(x), "weight");
}

void require_options(const CriterionOptions& o) {
    if (!(o.tol > 0.0) || !(o.horizon > 0.0)) {
        throw Error(ErrorKind::Precondition, "criterion tolerance and horizon must be positive");
    }
}

struct Cell {
    double x;
    double mu;           // rho1(x) h
    double transported;  // rho1(phi(t,x)) |det| h
};

std::vector<double> cell_nodes(const CompactBox& K, double spacing, double& h) {
    if (!(K.high > K.low)) throw Error(ErrorKind::Precondition, "compact box must have positive width");
    const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround((K.high - K.low) / spacing)));
    h = (K.high - K.low) / static_cast<double>(n);
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = K.low + (static_cast<double>(i) + 0.5) * h;
    return xs;
}

// Forward-image cells at time t; nodes with a vanishing or non-finite
// Jacobian are dropped and counted.
std::vector<Cell> forward_cells(const WeightFunction& rho1, const Semiflow& phi, const CompactBox& K,
                                double t, double spacing, std::size_t& excluded) {
    double h = 0.0;
    std::vector<Cell> cells;
    for (double x : cell_nodes(K, spacing, h)) {
        double det = std::abs(phi.jac_det(t, x));
        if (!(det > 0.0) || !std::isfinite(det)) {
            ++excluded;
            continue;
        }
        double y = phi.forward(t, x);
        double dens = weight_at(rho1, y) * det;
        // e^t overflowing against a vanishing weight: the mass is 0 in the limit
        if (std::isnan(dens)) dens = 0.0;
        cells.push_back({x, weight_at(rho1, x) * h, dens * h});
    }
    return cells;
}

std::vector<double> below_times(std::span<const double> times, std::span<const double> values, double tol) {
    std::vector<double> out;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (values[i] < tol) out.push_back(times[i]);
    }
    return out;
}

} // namespace

CriterionVerdict liminf_criterion_halfline(const WeightFunction& rho, const DomainSpec& domain,
                                           const AdmissibilityCertificate& certificate,
                                           const CriterionOptions& options, double window) {
    require_options(options);
    if (domain.kind() != DomainKind::HalfLine) {
        throw Error(ErrorKind::Precondition, "lim inf criterion needs the half-line domain");
    }
    if (certificate.kind != CertificateKind::ScalarWeight || !certificate.holds) {
        throw Error(ErrorKind::Precondition, "lim inf criterion needs a passing weight admissibility certificate");
    }
    if (!(window > 0.0)) throw Error(ErrorKind::Precondition, "window must be positive");
    CriterionVerdict v;
    v.criterion = Criterion::LimInfHalfLine;
    v.horizon = options.horizon;
    v.tol = options.tol;
    constexpr int kPerWindow = 65;
    std::vector<double> xs;
    std::vector<double> mins;
    for (long long k = 0;; ++k) {
        const double X = static_cast<double>(k) * window;
        if (X > options.horizon) break;
        double m = std::numeric_limits<double>::infinity();
        for (int j = 0; j < kPerWindow; ++j) {
            m = std::min(m, weight_at(rho, X + window * j / (kPerWindow - 1)));
        }
        xs.push_back(X);
        mins.push_back(m);
        v.evidence.emplace_back(X, m);
    }
    auto hits = below_times(xs, mins, options.tol);
    v.holds = spans_scales(hits, options.min_scales);
    v.diagnostics["window"] = window;
    v.diagnostics["hits"] = static_cast<double>(hits.size());
    v.diagnostics["min_value"] = *std::min_element(mins.begin(), mins.end());
    return v;
}

CriterionVerdict pointwise_decay_criterion_line(const WeightFunction& rho, const DomainSpec& domain,
                                                std::span<const double> x_samples, Direction direction,
                                                const CriterionOptions& options) {
    require_options(options);
    if (domain.kind() != DomainKind::Line) {
        throw Error(ErrorKind::Precondition, "pointwise decay criterion needs the line domain");
    }
    if (direction == Direction::NotApplicable) {
        throw Error(ErrorKind::Precondition, "pointwise decay criterion needs a direction");
    }
    if (x_samples.empty()) throw Error(ErrorKind::Precondition, "no sample points");
    CriterionVerdict v;
    v.criterion = Criterion::PointwiseDecayLine;
    v.horizon = options.horizon;
    v.tol = options.tol;
    v.direction = direction;
    const auto times = integer_times(1, static_cast<long long>(std::floor(options.horizon)));

    auto one_direction = [&](double sign) {
        bool all = true;
        for (double x : x_samples) {
            std::vector<double> vals(times.size());
            for (std::size_t i = 0; i < times.size(); ++i) vals[i] = weight_at(rho, x + sign * times[i]);
            all = all && spans_scales(below_times(times, vals, options.tol), options.min_scales);
            v.evidence.emplace_back(x, *std::min_element(vals.begin(), vals.end()));
        }
        return all;
    };
    bool fwd = true;
    bool bwd = true;
    if (direction == Direction::Forward || direction == Direction::Both) {
        fwd = one_direction(1.0);
        v.diagnostics["forward_holds"] = fwd ? 1.0 : 0.0;
    }
    if (direction == Direction::Backward || direction == Direction::Both) {
        bwd = one_direction(-1.0);
        v.diagnostics["backward_holds"] = bwd ? 1.0 : 0.0;
    }
    v.holds = fwd && bwd;
    if (direction == Direction::Both) v.note = "evidence lists forward minima, then backward minima";
    return v;
}

MassCurve lp_mass_curve(const WeightFunction& rho1, const Semiflow& phi, const CompactBox& K,
                        std::span<const double> time_grid, MassOrientation orientation, double spacing) {
    if (!(spacing > 0.0)) throw Error(ErrorKind::Precondition, "quadrature spacing must be positive");
    MassCurve c;
    c.K = K;
    c.orientation = orientation;
    for (double t : time_grid) {
        double mass = 0.0;
        if (orientation == MassOrientation::ForwardImage) {
            for (const auto& cell : forward_cells(rho1, phi, K, t, spacing, c.excluded_points)) {
                mass += cell.transported;
            }
        } else {
            // mu(phi(t,.)^{-1} K) = int_{K cap image} rho1(x) / |det D phi(t, x)|, x = phi(t,.)^{-1}(y)
            double h = 0.0;
            for (double y : cell_nodes(K, spacing, h)) {
                if (!phi.in_image(t, y)) continue;
                auto x = phi.inverse_on_image(t, y);
                if (!x) {
                    ++c.excluded_points;
                    continue;
                }
                double det = std::abs(phi.jac_det(t, *x));
                if (!(det > 0.0) || !std::isfinite(det)) {
                    ++c.excluded_points;
                    continue;
                }
                mass += weight_at(rho1, *x) / det * h;
            }
        }
        c.times.push_back(t);
        c.masses.push_back(checked(mass, "mass"));
    }
    return c;
}

CriterionVerdict lp_semiflow_criterion(const WeightFunction& rho1, const Semiflow& phi,
                                       std::span<const CompactBox> compacts,
                                       std::span<const double> time_grid, const CriterionOptions& options) {
    require_options(options);
    if (compacts.empty()) throw Error(ErrorKind::Precondition, "no compact boxes given");
    CriterionVerdict v;
    v.criterion = Criterion::LpSemiflowMass;
    v.horizon = options.horizon;
    v.tol = options.tol;
    v.note = std::string("orientation ") + to_string(MassOrientation::ForwardImage);
    std::vector<double> worst(time_grid.size(), 0.0);
    std::vector<double> worst_refined(time_grid.size(), 0.0);
    std::size_t excluded = 0;
    bool all = true;
    bool all_refined = true;
    for (const auto& K : compacts) {
        std::vector<double> mass(time_grid.size());
        std::vector<double> refined(time_grid.size());
        for (std::size_t n = 0; n < time_grid.size(); ++n) {
            auto cells = forward_cells(rho1, phi, K, time_grid[n], kMassQuadSpacing, excluded);
            double total = 0.0;
            for (const auto& c : cells) total += c.transported;
            // drop the densest cells while the removed mu-mass stays <= 1/n
            std::vector<std::size_t> order(cells.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return cells[a].transported > cells[b].transported;
            });
            const double budget = 1.0 / static_cast<double>(n + 1);
            double removed_mu = 0.0;
            double kept = total;
            for (std::size_t idx : order) {
                if (removed_mu + cells[idx].mu > budget) break;
                removed_mu += cells[idx].mu;
                kept -= cells[idx].transported;
            }
            mass[n] = checked(total, "mass");
            refined[n] = std::max(0.0, kept);
            worst[n] = std::max(worst[n], mass[n]);
            worst_refined[n] = std::max(worst_refined[n], refined[n]);
        }
        all = all && spans_scales(below_times(time_grid, mass, options.tol), options.min_scales);
        all_refined = all_refined && spans_scales(below_times(time_grid, refined, options.tol), options.min_scales);
    }
    for (std::size_t n = 0; n < time_grid.size(); ++n) v.evidence.emplace_back(time_grid[n], worst[n]);
    v.holds = all;
    v.diagnostics["refined_holds"] = all_refined ? 1.0 : 0.0;
    v.diagnostics["excluded_points"] = static_cast<double>(excluded);
    if (!worst.empty()) {
        v.diagnostics["min_mass"] = *std::min_element(worst.begin(), worst.end());
        v.diagnostics["min_refined_mass"] = *std::min_element(worst_refined.begin(), worst_refined.end());
    }
    return v;
}

SupCurves c0_sup_curves(const WeightFunction& rho, const Semiflow& phi, const CompactBox& K,
                        std::span<const double> time_grid, std::size_t samples) {
    const auto ks = linspace(K.low, K.high, std::max<std::size_t>(samples, 2));
    const auto win = phi.domain().window();
    SupCurves c;
    for (double t : time_grid) {
        double img = 0.0;
        for (double x : ks) img = std::max(img, weight_at(rho, phi.forward(t, x)));
        double pre = 0.0;  // sup over the empty set
        bool scan = false;
        for (double y : ks) {
            if (!phi.in_image(t, y)) continue;
            auto x = phi.inverse_on_image(t, y);
            if (!x) {
                scan = true;
                break;
            }
            pre = std::max(pre, weight_at(rho, *x));
        }
        if (scan) {
            // no inverse: scan the forward map over the window
            pre = 0.0;
            constexpr std::size_t kScan = 4097;
            for (std::size_t i = 0; i < kScan; ++i) {
                double x = win.low + (win.high - win.low) * (static_cast<double>(i) + 0.5) / kScan;
                if (K.contains(phi.forward(t, x))) pre = std::max(pre, weight_at(rho, x));
            }
        }
        c.times.push_back(t);
        c.s_pre.push_back(pre);
        c.s_img.push_back(img);
    }
    return c;
}

CriterionVerdict c0_semiflow_criterion(const WeightFunction& rho, const Semiflow& phi,
                                       std::span<const CompactBox> compacts,
                                       std::span<const double> time_grid, const CriterionOptions& options) {
    require_options(options);
    if (compacts.empty()) throw Error(ErrorKind::Precondition, "no compact boxes given");
    CriterionVerdict v;
    v.criterion = Criterion::C0SemiflowSup;
    v.horizon = options.horizon;
    v.tol = options.tol;
    v.note = "value is max(s_pre, s_img)";
    std::vector<double> worst(time_grid.size(), 0.0);
    bool all = true;
    for (const auto& K : compacts) {
        double inf_rho = std::numeric_limits<double>::infinity();
        for (double x : linspace(K.low, K.high, 257)) inf_rho = std::min(inf_rho, weight_at(rho, x));
        if (!(inf_rho > 0.0)) throw Error(ErrorKind::Precondition, "inf of rho over K must be positive");
        auto c = c0_sup_curves(rho, phi, K, time_grid);
        std::vector<double> both(time_grid.size());
        for (std::size_t i = 0; i < both.size(); ++i) {
            both[i] = std::max(c.s_pre[i], c.s_img[i]);
            worst[i] = std::max(worst[i], both[i]);
        }
        all = all && spans_scales(below_times(time_grid, both, options.tol), options.min_scales);
    }
    for (std::size_t i = 0; i < time_grid.size(); ++i) v.evidence.emplace_back(time_grid[i], worst[i]);
    v.holds = all;
    return v;
}

namespace {

CriterionVerdict weighted_jacobian(Criterion kind, bool with_jacobian, const WeightFunction& rho,
                                   const Semiflow& phi, std::span<const double> x_samples,
                                   std::span<const double> time_grid, const CriterionOptions& options,
                                   const AdmissibilityCertificate* condition_d) {
    require_options(options);
    const bool cert_ok = condition_d != nullptr && condition_d->kind == CertificateKind::ConditionD &&
                         condition_d->holds;
    if (!phi.group_like() && !cert_ok) {
        throw Error(ErrorKind::CriterionUnavailable,
                    "inverse-time flow unavailable: " + phi.name() +
                        " is not group-like and condition (D) is not certified");
    }
    if (x_samples.empty()) throw Error(ErrorKind::Precondition, "no sample points");
    CriterionVerdict v;
    v.criterion = kind;
    v.horizon = options.horizon;
    v.tol = options.tol;
    v.note = phi.group_like() ? "group-like flow" : "condition (D) certified on samples";
    v.note += "; hypotheses checked on the sampled lattice only";
    if (!with_jacobian) v.note += "; target limit 0 assumed (source states no limit value)";
    bool all = true;
    std::size_t undefined = 0;
    for (double x : x_samples) {
        std::vector<double> vals(time_grid.size());
        for (std::size_t i = 0; i < time_grid.size(); ++i) {
            const double t = time_grid[i];
            auto back = phi.backward(t, x);
            if (!back) {
                vals[i] = std::numeric_limits<double>::infinity();
                ++undefined;
                continue;
            }
            double q = weight_at(rho, *back);
            if (with_jacobian) {
                auto det = phi.backward_jac_det(t, x);
                q = det ? q * std::abs(*det) : std::numeric_limits<double>::infinity();
            }
            vals[i] = checked(q, "weighted Jacobian");
        }
        all = all && spans_scales(below_times(time_grid, vals, options.tol), options.min_scales);
        v.evidence.emplace_back(x, vals.empty() ? 0.0 : *std::min_element(vals.begin(), vals.end()));
    }
    v.holds = all;
    v.diagnostics["undefined_points"] = static_cast<double>(undefined);
    return v;
}

} // namespace

CriterionVerdict weighted_jacobian_criterion_lp(const WeightFunction& rho, const Semiflow& phi,
                                                std::span<const double> x_samples,
                                                std::span<const double> time_grid,
                                                const CriterionOptions& options,
                                                const AdmissibilityCertificate* condition_d) {
    return weighted_jacobian(Criterion::WeightedJacobianLp, true, rho, phi, x_samples, time_grid, options,
                             condition_d);
}

CriterionVerdict weighted_jacobian_criterion_c0(const WeightFunction& rho, const Semiflow& phi,
                                                std::span<const double> x_samples,
                                                std::span<const double> time_grid,
                                                const CriterionOptions& options,
                                                const AdmissibilityCertificate* condition_d) {
    return weighted_jacobian(Criterion::WeightedJacobianC0, false, rho, phi, x_samples, time_grid, options,
                             condition_d);
}

CriterionVerdict discrete_spectrum_criterion(const OperatorFamily& family, std::span<const double> time_grid,
                                             const CriterionOptions& options) {
    require_options(options);
    if (family.kind() != FamilyKind::Diagonal) {
        throw Error(ErrorKind::Precondition, "discrete spectrum criterion needs a diagonal family");
    }
    CriterionVerdict v;
    v.criterion = Criterion::DiscreteSpectrum;
    v.horizon = options.horizon;
    v.tol = options.tol;
    std::vector<double> vals(time_grid.size(), 0.0);
    for (std::size_t i = 0; i < time_grid.size(); ++i) {
        for (double theta : family.frequencies()) {
            const double cycles = theta / (2.0 * std::numbers::pi) * time_grid[i];
            const double frac = cycles - std::round(cycles);
            vals[i] = std::max(vals[i], 2.0 * std::abs(std::sin(std::numbers::pi * frac)));
        }
        v.evidence.emplace_back(time_grid[i], vals[i]);
    }
    v.holds = spans_scales(below_times(time_grid, vals, options.tol), options.min_scales);
    return v;
}

ConsistencyRecord cross_validate(const CriterionVerdict& criterion, const RecurrenceReport& detector) {
    ConsistencyRecord r;
    r.criterion = criterion.criterion;
    r.criterion_holds = criterion.holds;
    r.detector_verdict = detector.verdict;
    r.detector_method = detector.method;
    const bool found = detector.verdict == Verdict::WitnessFound;
    if (criterion.holds == found) {
        r.status = ConsistencyStatus::Agree;
        return r;
    }
    r.status = criterion.holds ? ConsistencyStatus::CriterionYesDetectorNo
                               : ConsistencyStatus::CriterionNoDetectorYes;
    r.criterion_evidence = criterion.evidence;
    r.witness_times = detector.witness_times;
    r.witness_residuals = detector.residuals;
    r.message = std::string(to_string(criterion.criterion)) + (criterion.holds ? " holds" : " fails") +
                " but " + to_string(detector.method) + " reports " + to_string(detector.verdict) +
                " (criterion tol " + std::to_string(criterion.tol) + ", detector tol " +
                std::to_string(detector.tol) + ")";
    return r;
}

} // namespace reclab
