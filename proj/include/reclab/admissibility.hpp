#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reclab/domain.hpp"
#include "reclab/semiflow.hpp"
#include "reclab/weight.hpp"

namespace reclab {

/// Relative slack on every sampled admissibility inequality.
inline constexpr double kAdmissibilityTol = 1e-9;

enum class CertificateKind { ScalarWeight, LpSemiflow, C0Semiflow, ConditionD };

const char* to_string(CertificateKind kind);

/// Sampled certification of an admissibility inequality. `holds` is exactly
/// `worst_ratio <= 1 + kAdmissibilityTol`; the witness fields are filled
/// exactly when it fails. Certification covers the sample lattice only.
struct AdmissibilityCertificate {
    CertificateKind kind = CertificateKind::ScalarWeight;
    bool holds = false;
    double worst_ratio = 0.0;
    std::optional<double> witness_point;
    std::optional<double> witness_time;
    double M_used = 1.0;
    double omega_used = 0.0;
    std::size_t samples_checked = 0;
    std::string scope;
    /// Condition (D): escape time t0 per compact (inf when none found).
    std::vector<double> escape_times;
};

/// Closed box [low, high] standing in for a compact subset of the domain.
struct CompactBox {
    double low = 0.0;
    double high = 1.0;
    bool contains(double x) const { return x >= low && x <= high; }
};

/// rho(t) <= M e^{omega |t'|} rho(t + t') on all sample pairs with t + t'
/// inside the truncated window; pairs leaving it are skipped.
AdmissibilityCertificate check_weight_admissible(const WeightFunction& rho, const DomainSpec& domain,
                                                 std::span<const double> t_samples,
                                                 std::span<const double> shift_samples);

/// rho1(x) <= M e^{omega |t|} rho1(phi(t,x)) |det D phi(t,x)|.
AdmissibilityCertificate check_lp_semiflow_admissible(const WeightFunction& rho1, const Semiflow& phi,
                                                      const DomainSpec& domain,
                                                      std::span<const double> t_samples,
                                                      std::span<const double> x_samples, double M,
                                                      double omega);

/// Default delta ladder for the compactness surrogate.
inline constexpr double kDeltaLadder[] = {1.0, 1e-1, 1e-2, 1e-3};

/// (i) rho(x) <= M e^{omega|t|} rho(phi(t,x)); (ii) for every box K, delta on
/// the ladder and sampled t, the sampled set {x : phi(t,x) in K, rho(x) >= delta}
/// keeps a margin of two local sample spacings from every open edge of the
/// truncated window.
AdmissibilityCertificate check_c0_semiflow_admissible(const WeightFunction& rho, const Semiflow& phi,
                                                      const DomainSpec& domain,
                                                      std::span<const double> t_samples,
                                                      std::span<const double> x_samples,
                                                      std::span<const CompactBox> compacts, double M,
                                                      double omega);

/// For each K there is a sampled t0 <= t_max with phi(t, x) outside K for
/// every sampled x and every sampled t in [t0, t_max]. worst_ratio is
/// max_K t0 / t_max (inf when some K never escapes).
AdmissibilityCertificate check_condition_D(const Semiflow& phi, std::span<const CompactBox> compacts,
                                           std::span<const double> t_samples,
                                           std::span<const double> x_samples);

/// Evenly spaced samples a, ..., b (n points).
std::vector<double> linspace(double a, double b, std::size_t n);
/// Geometrically spaced samples a, ..., b (a, b > 0).
std::vector<double> geomspace(double a, double b, std::size_t n);

} // namespace reclab
