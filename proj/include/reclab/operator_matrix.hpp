#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "reclab/family.hpp"

namespace reclab {

inline constexpr std::size_t kDefaultMatrixCap = 4096;

/// Dense nodal matrix of T(t) with the norm data of its space, so induced
/// norms are taken in the weighted norm rather than the Euclidean one.
struct OperatorMatrix {
    Eigen::MatrixXcd entries;
    double t = 0.0;
    std::uint64_t space_id = 0;
    NormMode mode;
    /// rho_i (sup) or rho_i w_i (Lp) per node.
    Eigen::VectorXd norm_weights;
    bool product_space = false;

    Eigen::Index size() const { return entries.rows(); }
    OperatorMatrix minus_identity() const;
    GridFunction apply(const WeightedGridSpace& space, const GridFunction& f) const;
};

/// Column j is apply(t, e_j). Throws ErrorKind::Size above the cap.
OperatorMatrix assemble_matrix(const WeightedGridSpace& space, const OperatorFamily& family, double t,
                               std::size_t cap = kDefaultMatrixCap);

struct SpectralRadiusEstimate {
    double r = 0.0;
    bool converged = false;
    int iterations = 0;
};

/// Power iteration on a fixed pseudo-random start vector. The estimate is
/// |A v_k| for the normalized iterate; converged means the relative change
/// stayed below tol over the last 10 iterations. An iterate that vanishes
/// exactly (nilpotent matrix) yields r = 0, converged.
SpectralRadiusEstimate spectral_radius_estimate(const OperatorMatrix& m, int iters = 2000,
                                                double tol = 1e-10);

/// Induced operator norm in the space norm.
///
/// p = 1 and sup are exact column/row formulas. p = 2 conjugates with the
/// square-rooted weights and runs power iteration on A^H A. Other p use the
/// Higham p-norm power method from several starts. Every value except the
/// exact formulas is a certified lower bound (attained by a concrete vector)
/// and a heuristic estimate of the supremum.
double operator_norm_estimate(const OperatorMatrix& m);

} // namespace reclab
