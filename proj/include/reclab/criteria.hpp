#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "reclab/admissibility.hpp"
#include "reclab/family.hpp"
#include "reclab/recurrence.hpp"
#include "reclab/semiflow.hpp"
#include "reclab/weight.hpp"

namespace reclab {

enum class Criterion {
    LimInfHalfLine,
    PointwiseDecayLine,
    LpSemiflowMass,
    C0SemiflowSup,
    WeightedJacobianLp,
    WeightedJacobianC0,
    DiscreteSpectrum,
};

enum class Direction { Forward, Backward, Both, NotApplicable };

const char* to_string(Criterion c);
const char* to_string(Direction d);

/// lim inf of a quantity is read as "below tol at times spanning at least
/// min_scales dyadic scales within the horizon".
struct CriterionOptions {
    double tol = 1e-4;
    double horizon = 1e3;
    std::size_t min_scales = 3;
};

struct CriterionVerdict {
    Criterion criterion = Criterion::LimInfHalfLine;
    bool holds = false;
    /// (t or x, value) pairs of the exact quantity the criterion names.
    std::vector<std::pair<double, double>> evidence;
    double horizon = 0.0;
    Direction direction = Direction::NotApplicable;
    double tol = 0.0;
    std::map<std::string, double> diagnostics;
    std::string note;
};

/// True when the times span at least `min_scales` dyadic scales.
bool spans_scales(std::span<const double> times, std::size_t min_scales);

/// Holds iff min rho over [X, X + window] drops below tol for X values
/// spanning the required scales up to the horizon. Evidence: (X, window min).
CriterionVerdict liminf_criterion_halfline(const WeightFunction& rho, const DomainSpec& domain,
                                           const AdmissibilityCertificate& certificate,
                                           const CriterionOptions& options = {}, double window = 1.0);

/// For every sampled x, rho(x + t) (Forward) or rho(x - t) (Backward) is
/// below tol at integer times t <= horizon spanning the required scales.
/// Both requires the two directions. Evidence: (x, min value).
CriterionVerdict pointwise_decay_criterion_line(const WeightFunction& rho, const DomainSpec& domain,
                                                std::span<const double> x_samples, Direction direction,
                                                const CriterionOptions& options = {});

enum class MassOrientation { ForwardImage, Preimage };

const char* to_string(MassOrientation o);

struct MassCurve {
    std::vector<double> times;
    std::vector<double> masses;
    CompactBox K;
    MassOrientation orientation = MassOrientation::ForwardImage;
    /// Quadrature nodes skipped because det D phi vanished or was not finite.
    std::size_t excluded_points = 0;
};

/// Quadrature spacing for mass curves; compacts sharing endpoints on this
/// lattice share nodes, so masses add exactly over adjacent boxes.
inline constexpr double kMassQuadSpacing = 1e-3;

/// ForwardImage: m_K(t) = int_K rho1(phi(t,x)) |det D phi(t,x)| dx, the
/// mu-mass of phi(t, K). Preimage: mu(phi(t,.)^{-1}(K)).
MassCurve lp_mass_curve(const WeightFunction& rho1, const Semiflow& phi, const CompactBox& K,
                        std::span<const double> time_grid,
                        MassOrientation orientation = MassOrientation::ForwardImage,
                        double spacing = kMassQuadSpacing);

/// Holds iff for every K the forward-image mass is below tol at times
/// spanning the required scales (sets L_n = K). The refined form removes
/// from K, at the n-th time, the cells of largest transported density up to
/// mu-mass 1/n; it is reported in the diagnostics.
CriterionVerdict lp_semiflow_criterion(const WeightFunction& rho1, const Semiflow& phi,
                                       std::span<const CompactBox> compacts,
                                       std::span<const double> time_grid,
                                       const CriterionOptions& options = {});

struct SupCurves {
    std::vector<double> times;
    std::vector<double> s_pre;
    std::vector<double> s_img;
};

/// s_pre(t) = sup rho over phi(t,.)^{-1}(K) (empty sup is 0) and
/// s_img(t) = sup rho over phi(t, K), on samples.
SupCurves c0_sup_curves(const WeightFunction& rho, const Semiflow& phi, const CompactBox& K,
                        std::span<const double> time_grid, std::size_t samples = 257);

/// Holds iff max(s_pre, s_img) drops below tol at times spanning the
/// required scales, for every K. Requires inf_K rho > 0.
CriterionVerdict c0_semiflow_criterion(const WeightFunction& rho, const Semiflow& phi,
                                       std::span<const CompactBox> compacts,
                                       std::span<const double> time_grid,
                                       const CriterionOptions& options = {});

/// rho(phi(-t,x)) |det D phi(-t,x)| below tol along times spanning the
/// required scales, for every sampled x. Needs a group-like flow or a
/// condition (D) certificate.
CriterionVerdict weighted_jacobian_criterion_lp(const WeightFunction& rho, const Semiflow& phi,
                                                std::span<const double> x_samples,
                                                std::span<const double> time_grid,
                                                const CriterionOptions& options = {},
                                                const AdmissibilityCertificate* condition_d = nullptr);

/// Same without the Jacobian factor; the target limit 0 is an assumption
/// and every verdict says so in its note.
CriterionVerdict weighted_jacobian_criterion_c0(const WeightFunction& rho, const Semiflow& phi,
                                                std::span<const double> x_samples,
                                                std::span<const double> time_grid,
                                                const CriterionOptions& options = {},
                                                const AdmissibilityCertificate* condition_d = nullptr);

/// Diagonal families: max_j |e^{i theta_j t} - 1| below tol at times
/// spanning the required scales (simultaneous near-returns).
CriterionVerdict discrete_spectrum_criterion(const OperatorFamily& family,
                                             std::span<const double> time_grid,
                                             const CriterionOptions& options = {});

enum class ConsistencyStatus { Agree, CriterionYesDetectorNo, CriterionNoDetectorYes };

const char* to_string(ConsistencyStatus s);

struct ConsistencyRecord {
    ConsistencyStatus status = ConsistencyStatus::Agree;
    Criterion criterion = Criterion::LimInfHalfLine;
    bool criterion_holds = false;
    Verdict detector_verdict = Verdict::NoWitnessInRange;
    DetectorMethod detector_method = DetectorMethod::DirectScan;
    /// Filled for both disagreement kinds; complete for CriterionNoDetectorYes.
    std::vector<std::pair<double, double>> criterion_evidence;
    std::vector<double> witness_times;
    std::vector<double> witness_residuals;
    std::string message;

    bool is_error() const { return status == ConsistencyStatus::CriterionNoDetectorYes; }
};

/// TruncationLimited counts as "no witness".
ConsistencyRecord cross_validate(const CriterionVerdict& criterion, const RecurrenceReport& detector);

} // namespace reclab
