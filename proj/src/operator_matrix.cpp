#include "reclab/operator_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "reclab/error.hpp"

namespace reclab {

namespace {

Eigen::VectorXcd start_vector(Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Eigen::VectorXcd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex{normal(rng), normal(rng)};
    return v / v.norm();
}

void require_finite(double value, const char* what) {
    if (!std::isfinite(value)) throw Error(ErrorKind::Numeric, std::string(what) + " is not finite");
}

double weighted_pnorm(const Eigen::VectorXcd& v, const Eigen::VectorXd& c, double p) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) sum += std::pow(std::abs(v(i)), p) * c(i);
    return std::pow(sum, 1.0 / p);
}

} // namespace

OperatorMatrix OperatorMatrix::minus_identity() const {
    OperatorMatrix out = *this;
    out.entries -= Eigen::MatrixXcd::Identity(entries.rows(), entries.cols());
    return out;
}

GridFunction OperatorMatrix::apply(const WeightedGridSpace& space, const GridFunction& f) const {
    space.require_member(f);
    if (space.id() != space_id) throw Error(ErrorKind::Structural, "matrix assembled on another space");
    Eigen::Map<const Eigen::VectorXcd> v(f.values().data(), static_cast<Eigen::Index>(f.size()));
    Eigen::VectorXcd out = entries * v;
    return space.from_values(std::vector<Complex>(out.data(), out.data() + out.size()));
}

OperatorMatrix assemble_matrix(const WeightedGridSpace& space, const OperatorFamily& family, double t,
                               std::size_t cap) {
    const std::size_t n = space.size();
    if (n > cap) {
        throw Error(ErrorKind::Size, "grid size " + std::to_string(n) + " exceeds matrix cap " +
                                         std::to_string(cap));
    }
    if (family.space().id() != space.id()) {
        throw Error(ErrorKind::Structural, "family acts on a different space");
    }
    OperatorMatrix m;
    const auto N = static_cast<Eigen::Index>(n);
    m.entries = Eigen::MatrixXcd::Zero(N, N);
    m.t = t;
    m.space_id = space.id();
    m.mode = space.mode();
    m.product_space = space.is_product();
    m.norm_weights.resize(N);
    const auto rho = space.weight_samples();
    const auto w = space.quad_weights();
    for (std::size_t i = 0; i < n; ++i) {
        m.norm_weights(static_cast<Eigen::Index>(i)) = m.mode.is_sup() ? rho[i] : rho[i] * w[i];
    }
    for (std::size_t j = 0; j < n; ++j) {
        GridFunction col = family.apply(t, space.basis(j));
        const auto vals = col.values();
        for (std::size_t i = 0; i < n; ++i) {
            m.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = vals[i];
        }
    }
    return m;
}

SpectralRadiusEstimate spectral_radius_estimate(const OperatorMatrix& m, int iters, double tol) {
    if (m.entries.rows() != m.entries.cols()) throw Error(ErrorKind::Structural, "matrix is not square");
    SpectralRadiusEstimate est;
    Eigen::VectorXcd v = start_vector(m.entries.rows(), 0x5eed5eedULL);
    std::vector<double> history;
    for (int k = 0; k < iters; ++k) {
        Eigen::VectorXcd w = m.entries * v;
        const double growth = w.norm();
        require_finite(growth, "power iterate");
        est.iterations = k + 1;
        if (growth == 0.0) {
            est.r = 0.0;
            est.converged = true;
            return est;
        }
        history.push_back(growth);
        v = w / growth;
        if (history.size() > 10) {
            bool stable = true;
            for (std::size_t j = history.size() - 10; j < history.size(); ++j) {
                double prev = history[j - 1];
                if (std::abs(history[j] - prev) > tol * std::max(prev, 1e-300)) {
                    stable = false;
                    break;
                }
            }
            if (stable) {
                est.r = growth;
                est.converged = true;
                return est;
            }
        }
    }
    est.r = history.empty() ? 0.0 : history.back();
    est.converged = false;
    return est;
}

double operator_norm_estimate(const OperatorMatrix& m) {
    const auto& A = m.entries;
    const Eigen::Index n = A.rows();
    if (n == 0) return 0.0;
    if (m.product_space) {
        throw Error(ErrorKind::Structural, "operator norm on product spaces is not supported");
    }
    const Eigen::VectorXd& c = m.norm_weights;
    if (m.mode.is_sup()) {
        double best = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            double row = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) row += std::abs(A(i, j)) / c(j);
            best = std::max(best, c(i) * row);
        }
        require_finite(best, "operator norm");
        return best;
    }
    const double p = m.mode.p;
    if (p == 1.0) {
        double best = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            double col = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) col += std::abs(A(i, j)) * c(i);
            best = std::max(best, col / c(j));
        }
        require_finite(best, "operator norm");
        return best;
    }
    if (p == 2.0) {
        Eigen::VectorXd s = c.cwiseSqrt();
        Eigen::MatrixXcd B = s.asDiagonal() * A * s.cwiseInverse().asDiagonal();
        Eigen::MatrixXcd G = B.adjoint() * B;
        Eigen::VectorXcd v = start_vector(n, 0xa11ce5ULL);
        double sigma2 = 0.0;
        for (int k = 0; k < 500; ++k) {
            Eigen::VectorXcd w = G * v;
            double g = w.norm();
            require_finite(g, "operator norm");
            if (g == 0.0) return 0.0;
            v = w / g;
            if (std::abs(g - sigma2) <= 1e-14 * g) {
                sigma2 = g;
                break;
            }
            sigma2 = g;
        }
        // Certified value: ||B v|| for the final unit vector.
        return (B * v).norm();
    }
    // Higham's p-norm power method in weighted coordinates u_i = c_i^{1/p} v_i.
    Eigen::VectorXd s(n);
    for (Eigen::Index i = 0; i < n; ++i) s(i) = std::pow(c(i), 1.0 / p);
    Eigen::MatrixXcd B = s.asDiagonal() * A * s.cwiseInverse().asDiagonal();
    const double q = p / (p - 1.0);
    auto dual = [](const Eigen::VectorXcd& y, double r) {
        Eigen::VectorXcd d(y.size());
        double scale = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) scale += std::pow(std::abs(y(i)), r);
        scale = std::pow(scale, 1.0 / r);
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            double a = std::abs(y(i));
            d(i) = a == 0.0 ? Complex{} : std::pow(a / scale, r - 1.0) * (y(i) / a);
        }
        return d;
    };
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    double best = 0.0;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        Eigen::VectorXcd x = start_vector(n, seed);
        x /= weighted_pnorm(x, ones, p);
        for (int k = 0; k < 100; ++k) {
            Eigen::VectorXcd y = B * x;
            double val = weighted_pnorm(y, ones, p);
            require_finite(val, "operator norm");
            best = std::max(best, val);
            if (val == 0.0) break;
            Eigen::VectorXcd z = B.adjoint() * dual(y, p);
            Eigen::VectorXcd next = dual(z, q);
            if ((next - x).norm() < 1e-12) break;
            x = next / weighted_pnorm(next, ones, p);
        }
    }
    return best;
}

} // namespace reclab
