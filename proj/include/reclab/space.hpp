#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "reclab/domain.hpp"
#include "reclab/weight.hpp"

namespace reclab {

using Complex = std::complex<double>;

struct NormMode {
    enum class Kind { Lp, C0Sup };
    Kind kind = Kind::Lp;
    double p = 1.0;

    static NormMode lp(double p);
    static NormMode sup() { return {Kind::C0Sup, 0.0}; }

    bool is_sup() const { return kind == Kind::C0Sup; }
};

/// Complex samples over the grid of one WeightedGridSpace.
///
/// The truncation flag records that some operator producing this function
/// read outside the computational window on a domain whose true values
/// there are unknown.
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(std::uint64_t space_id, std::vector<Complex> values, bool truncated = false);

    std::uint64_t space_id() const { return space_id_; }
    std::size_t size() const { return values_.size(); }
    std::span<const Complex> values() const { return values_; }
    const Complex& operator[](std::size_t i) const { return values_[i]; }
    bool truncated() const { return truncated_; }

    GridFunction with_truncated(bool flag) const;

    GridFunction& operator+=(const GridFunction& other);
    GridFunction& operator-=(const GridFunction& other);
    GridFunction& operator*=(Complex alpha);

    friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
    friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
    friend GridFunction operator*(Complex alpha, GridFunction f) { return f *= alpha; }

    /// Bitwise equality of samples (flags ignored).
    bool same_values(const GridFunction& other) const;

private:
    void require_same_space(const GridFunction& other) const;

    std::uint64_t space_id_ = 0;
    std::vector<Complex> values_;
    bool truncated_ = false;
};

/// Result of reading a grid function at an arbitrary abscissa.
struct PointRead {
    Complex value;
    bool outside = false;
};

/// Interpolation stencil of an abscissa: value = w0 f[i0] + w1 f[i1].
struct Stencil {
    std::size_t i0 = 0;
    std::size_t i1 = 0;
    double w0 = 0.0;
    double w1 = 0.0;
    bool outside = false;
};

/// Discretized L^p_rho or C_{0,rho} space over a uniform midpoint grid.
///
/// Nodes sit at cell midpoints low + (i + 1/2) h of the domain window, every
/// quadrature weight equals h (composite midpoint rule). A space may also be
/// a direct product of two spaces; its norm is then the max of the component
/// norms and point reads are not defined.
class WeightedGridSpace {
public:
    static WeightedGridSpace uniform(const DomainSpec& domain, std::size_t n_points, NormMode mode,
                                     const WeightFunction& weight);
    /// n = round(window width / h) cells.
    static WeightedGridSpace with_spacing(const DomainSpec& domain, double h, NormMode mode,
                                          const WeightFunction& weight);
    /// C^n with unit weights and unit quadrature weights.
    static WeightedGridSpace coordinates(std::size_t n, NormMode mode = NormMode::lp(2.0));
    static WeightedGridSpace product(const WeightedGridSpace& a, const WeightedGridSpace& b);

    std::uint64_t id() const;
    std::size_t size() const;
    const DomainSpec& domain() const;
    NormMode mode() const;
    double spacing() const;
    std::span<const double> points() const;
    std::span<const double> quad_weights() const;
    std::span<const double> weight_samples() const;
    const std::string& weight_label() const;

    bool is_product() const;
    /// Components of a product space; empty otherwise.
    std::span<const WeightedGridSpace> components() const;
    GridFunction component(const GridFunction& f, std::size_t which) const;
    GridFunction join(const GridFunction& a, const GridFunction& b) const;

    GridFunction zeros() const;
    GridFunction sample(const std::function<Complex(double)>& fn) const;
    GridFunction from_values(std::vector<Complex> values) const;
    /// Unit nodal vector e_j.
    GridFunction basis(std::size_t j) const;

    /// Linear interpolation between nodes; constant extrapolation between the
    /// window edge and the outermost node. Abscissae within 1e-9 cells of a
    /// node read that node exactly.
    PointRead read(const GridFunction& f, double x) const;
    Stencil locate(double x) const;

    void require_member(const GridFunction& f) const;

    friend bool operator==(const WeightedGridSpace& a, const WeightedGridSpace& b) {
        return a.id() == b.id();
    }

private:
    struct Data;
    explicit WeightedGridSpace(std::shared_ptr<const Data> data);
    std::shared_ptr<const Data> data_;
};

/// Lp: (sum_i |f_i|^p rho_i w_i)^{1/p}. C0Sup: max_i |f_i| rho_i.
double norm(const WeightedGridSpace& space, const GridFunction& f);
double distance(const WeightedGridSpace& space, const GridFunction& f, const GridFunction& g);

/// Indicator of [a, b] sampled at nodes.
GridFunction indicator(const WeightedGridSpace& space, double a, double b);
/// C^infinity bump supported on (a, b), peak value 1.
GridFunction smooth_bump(const WeightedGridSpace& space, double a, double b);
/// Piecewise linear hat on [a, b] with apex at the midpoint.
GridFunction hat(const WeightedGridSpace& space, double a, double b);

} // namespace reclab
