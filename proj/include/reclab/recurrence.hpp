#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reclab/error.hpp"
#include "reclab/family.hpp"
#include "reclab/operator_matrix.hpp"

namespace reclab {

enum class Verdict { WitnessFound, NoWitnessInRange, TruncationLimited };
enum class DetectorMethod { DirectScan, NestedBall, GDelta };

const char* to_string(Verdict v);
const char* to_string(DetectorMethod m);

/// Outcome of a recurrence detector. Residuals are recomputed from scratch
/// when the report is finalized, never copied from the search. A finite run
/// only sees finitely many time scales; `horizon` scopes every claim.
struct RecurrenceReport {
    Verdict verdict = Verdict::NoWitnessInRange;
    std::vector<double> witness_times;
    std::vector<double> residuals;
    DetectorMethod method = DetectorMethod::DirectScan;
    double tol = 0.0;
    double horizon = 0.0;
    bool truncated = false;
    std::map<std::string, double> parameters;
};

/// ||T(t) f - f||.
double residual(const OperatorFamily& family, const GridFunction& f, double t);

/// Number of distinct dyadic scales floor(log2 t) among positive times.
std::size_t dyadic_scales(std::span<const double> times);

/// WitnessFound needs at least three witnesses spread over three dyadic
/// scales; otherwise TruncationLimited when any evaluation read past the
/// window, else NoWitnessInRange.
Verdict classify(std::span<const double> witness_times, bool truncated);

/// Recomputes residual(family, f, t) for every witness and drops any time
/// whose fresh residual is not below the report tolerance.
RecurrenceReport finalize_report(const OperatorFamily& family, const GridFunction& f,
                                 RecurrenceReport draft);

RecurrenceReport direct_scan(const OperatorFamily& family, const GridFunction& f,
                             std::span<const double> time_grid, double tol);

/// Integer times first, ..., last with the given stride.
std::vector<double> integer_times(long long first, long long last, long long stride = 1);

struct TransitivityWitness {
    double t = 0.0;
    GridFunction g;
    double in_ball_residual = 0.0;
    double return_residual = 0.0;
};

/// Witness builder for translation and composition families: the candidate
/// is g = f + P_t f where the pullback tooth is (P_t f)(y) = f(phi(t,.)^{-1}(y))
/// on the image of phi(t, .) and 0 elsewhere, so T(t) P_t f = f.
class PullbackOracle {
public:
    explicit PullbackOracle(OperatorFamily family);

    GridFunction pullback(const GridFunction& f, double t) const;
    /// Accepted iff ||P_t f|| < eps and ||T(t) g - f|| < eps.
    std::optional<TransitivityWitness> operator()(const GridFunction& center, double eps, double t) const;

    const OperatorFamily& family() const { return family_; }

private:
    OperatorFamily family_;
    Semiflow phi_;
};

TransitivityWitness evaluate_pullback(const PullbackOracle& oracle, const GridFunction& center,
                                      double t);
std::optional<TransitivityWitness> pullback_witness_oracle(const OperatorFamily& family,
                                                           const GridFunction& center, double eps,
                                                           double t);

struct NestedBallStage {
    double t = 0.0;
    double eps = 0.0;
    GridFunction x;
    double in_ball_residual = 0.0;
    double return_residual = 0.0;
    double lipschitz = 0.0;
};

struct NestedBallOptions {
    /// Candidate times t_{n-1} + step k, k = 1, 2, ... up to max_time.
    double step = 1.0;
    /// Candidates are restricted to multiples of this (0 = no restriction).
    double multiple_of = 0.0;
    double max_time = 0.0;  // 0 = window width of the space
    /// Shrink factor applied to the admissible radius bound.
    double safety = 0.99;
    /// A candidate is taken when both residuals are below accept_fraction * eps;
    /// leaves room for the next radius instead of taking a barely-inside witness.
    double accept_fraction = 1.0;
};

struct NestedBallResult {
    GridFunction y;
    GridFunction x0;
    double eps0 = 0.0;
    std::vector<NestedBallStage> stages;
    /// Fresh residual(y, t_n) per stage.
    std::vector<double> stage_residuals;
    double distance_to_x0 = 0.0;
    /// distance(y, x0) < eps0 and residual(y, t_n) <= 2 eps_{n-1} for all n.
    bool certified = false;
    RecurrenceReport report;
};

class ConstructionStalled : public Error {
public:
    ConstructionStalled(const std::string& what, std::vector<NestedBallStage> partial)
        : Error(ErrorKind::ConstructionStalled, what), partial_(std::move(partial)) {}
    const std::vector<NestedBallStage>& partial_stages() const { return partial_; }

private:
    std::vector<NestedBallStage> partial_;
};

/// Cantor nested-ball construction of a recurrent vector near x0.
NestedBallResult nested_ball_construct(const PullbackOracle& oracle, const GridFunction& x0,
                                       double eps0, int stages, const NestedBallOptions& options = {});

/// Dyadic rationals p / 2^m, m <= max_level, with 1 < |q| <= horizon
/// (negative ones too for group families), each listed once, in order of
/// level then value.
std::vector<double> dyadic_rational_times(double horizon, int max_level, bool include_negative);

struct GDeltaPoint {
    int k = 0;
    bool passes = false;
};

struct GDeltaResult {
    int member_up_to = 0;
    double min_residual = 0.0;
    double argmin_time = 0.0;
    std::vector<GDeltaPoint> levels;
    std::vector<std::pair<double, double>> residual_curve;  // (q, residual)
};

/// Membership of x in the k-th open set {x : min_q ||T(q)x - x|| < 1/k}.
GDeltaResult gdelta_membership(const OperatorFamily& family, const GridFunction& x, int k_max,
                               std::span<const double> rational_times);

enum class RigidityKind { Strong, Uniform };

struct RigidityReport {
    RigidityKind kind = RigidityKind::Strong;
    std::vector<double> times;
    /// Strong: max residual over the test vectors. Uniform: ||T(t) - I||.
    std::vector<double> residuals;
    std::vector<double> near_return_times;
    double tol = 0.0;
    Verdict verdict = Verdict::NoWitnessInRange;
    double best_time = 0.0;
    double best_residual = 0.0;
};

RigidityReport rigidity_scan(const OperatorFamily& family, std::span<const GridFunction> test_vectors,
                             std::span<const double> time_grid, double tol);

RigidityReport uniform_rigidity_scan(const OperatorFamily& family, std::span<const double> time_grid,
                                     double tol, std::size_t cap = kDefaultMatrixCap);

} // namespace reclab
