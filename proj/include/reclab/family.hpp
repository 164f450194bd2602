#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "reclab/semiflow.hpp"
#include "reclab/space.hpp"

namespace reclab {

enum class TimeDomain { Forward, Group };

enum class FamilyKind { Translation, Composition, Diagonal, DirectSum, Rotated };

const char* to_string(FamilyKind kind);

/// Strongly continuous family t -> T(t) acting on one WeightedGridSpace.
///
/// apply(0, f) returns f unchanged (bitwise). norm_bound(t) is an upper bound
/// for the discrete operator norm of T(t) in the space norm; the nested-ball
/// builder uses it as a Lipschitz constant.
class OperatorFamily {
public:
    using ApplyFn = std::function<GridFunction(double, const GridFunction&)>;
    using BoundFn = std::function<double(double)>;

    struct Parts {
        FamilyKind kind = FamilyKind::Composition;
        std::string description;
        TimeDomain time_domain = TimeDomain::Forward;
        ApplyFn apply;
        BoundFn norm_bound;
        /// apply(n t0, .) is exact in t (no accumulated interpolation).
        bool exact_in_time = true;
        /// Inducing semiflow for translation and composition families.
        std::optional<Semiflow> semiflow;
        /// Diagonal frequencies, when diagonal.
        std::vector<double> frequencies;
        /// Rotation factor applied on top of the inner family.
        Complex rotation{1.0, 0.0};
    };

    OperatorFamily(WeightedGridSpace space, Parts parts);

    GridFunction apply(double t, const GridFunction& f) const;
    double norm_bound(double t) const;

    FamilyKind kind() const { return parts_.kind; }
    const std::string& description() const { return parts_.description; }
    TimeDomain time_domain() const { return parts_.time_domain; }
    const WeightedGridSpace& space() const { return space_; }
    bool exact_in_time() const { return parts_.exact_in_time; }
    const std::optional<Semiflow>& semiflow() const { return parts_.semiflow; }
    const std::vector<double>& frequencies() const { return parts_.frequencies; }
    Complex rotation() const { return parts_.rotation; }

private:
    WeightedGridSpace space_;
    Parts parts_;
};

/// (T(t) f)(x_i) = f(x_i + t) by linear interpolation. Reads past the
/// window are 0; they set the truncation flag except on the half-line,
/// whose functions are modelled as vanishing beyond trunc.
GridFunction translate_apply(const WeightedGridSpace& space, const GridFunction& f, double t);

/// (T_phi(t) f)(x_i) = f(phi(t, x_i)), same interpolation and flag rules.
GridFunction compose_apply(const WeightedGridSpace& space, const GridFunction& f, double t,
                           const Semiflow& phi);

/// Sharp bound on the discrete norm of f -> f(phi(t, .)) with linear
/// interpolation: the interpolation matrix A is nonnegative with unit row
/// sums, so ||A||_p <= (max_j sum_i c_i A_ij / c_j)^{1/p} (c = rho w) and
/// ||A||_sup = max_i rho_i sum_j A_ij / rho_j.
double composition_norm_bound(const WeightedGridSpace& space, double t, const Semiflow& phi);

OperatorFamily make_translation_family(const WeightedGridSpace& space);
OperatorFamily make_composition_family(const WeightedGridSpace& space, const Semiflow& phi);
/// apply(t, e_j) = e^{i theta_j t} e_j on a coordinate space of matching size.
OperatorFamily make_diagonal_family(const WeightedGridSpace& space, std::vector<double> frequencies);

/// lambda T(t) operator by operator; not a semigroup for lambda != 1.
OperatorFamily rotate_family(const OperatorFamily& family, Complex lambda);
/// T_A(t) (+) T_B(t) on the product space, max-of-components norm.
OperatorFamily direct_sum(const OperatorFamily& a, const OperatorFamily& b);

/// Rotation by e^{2 pi i p / q}; powers are reduced mod q so lambda^n is
/// exactly 1 whenever q divides p n.
struct RationalRotation {
    long long p = 0;
    long long q = 1;

    Complex value() const;
    Complex power(long long n) const;
};

enum class IteratePath { ExactInTime, Composed };

struct IterateResult {
    GridFunction value;
    IteratePath path = IteratePath::ExactInTime;
    bool beyond_horizon = false;
};

/// The single operator lambda T(t0) with access to its iterates.
class DiscreteOperator {
public:
    DiscreteOperator(OperatorFamily family, double t0);

    /// lambda^n T(t0)^n f. Uses apply(n t0, .) when the family is exact in
    /// time, n-fold composition otherwise (or when forced).
    IterateResult iterate(long long n, const GridFunction& f, bool force_composed = false) const;
    GridFunction apply(const GridFunction& f) const;

    double t0() const { return t0_; }
    const OperatorFamily& family() const { return family_; }
    const std::optional<RationalRotation>& rational_rotation() const { return rational_; }
    Complex rotation() const { return lambda_; }
    /// Window width; iterates with n t0 beyond it are flagged.
    double horizon() const;

    DiscreteOperator rotated(RationalRotation r) const;
    DiscreteOperator rotated(Complex lambda) const;

private:
    Complex power(long long n) const;

    OperatorFamily family_;
    double t0_;
    Complex lambda_{1.0, 0.0};
    std::optional<RationalRotation> rational_;
};

DiscreteOperator time_discretize(const OperatorFamily& family, double t0);
DiscreteOperator rotate_operator(const DiscreteOperator& op, Complex lambda);
DiscreteOperator rotate_operator(const DiscreteOperator& op, RationalRotation lambda);

} // namespace reclab
