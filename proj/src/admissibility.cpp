#include "reclab/admissibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "reclab/error.hpp"

namespace reclab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Worst {
    double ratio = 0.0;
    std::optional<double> point;
    std::optional<double> time;

    void offer(double r, double x, double t) {
        if (r > ratio || std::isnan(r)) {
            ratio = std::isnan(r) ? kInf : r;
            point = x;
            time = t;
        }
    }
};

AdmissibilityCertificate finish(CertificateKind kind, const Worst& worst, double M, double omega,
                                std::size_t count, std::string scope) {
    AdmissibilityCertificate c;
    c.kind = kind;
    c.worst_ratio = worst.ratio;
    c.holds = worst.ratio <= 1.0 + kAdmissibilityTol;
    if (!c.holds) {
        c.witness_point = worst.point;
        c.witness_time = worst.time;
    }
    c.M_used = M;
    c.omega_used = omega;
    c.samples_checked = count;
    c.scope = std::move(scope);
    return c;
}

std::string lattice_scope(std::size_t a, std::size_t b) {
    std::ostringstream os;
    os << "sampled lattice " << a << "x" << b << " (finite certification)";
    return os.str();
}

double positive_sample(const WeightFunction& rho, double x) {
    double v = rho.eval_unchecked(x);
    if (!(v > 0.0) || std::isnan(v)) {
        throw Error(ErrorKind::InvalidWeight,
                    rho.label() + " is not positive at x=" + std::to_string(x));
    }
    return v;
}

} // namespace

const char* to_string(CertificateKind kind) {
    switch (kind) {
    case CertificateKind::ScalarWeight: return "scalar_weight";
    case CertificateKind::LpSemiflow: return "lp_semiflow";
    case CertificateKind::C0Semiflow: return "c0_semiflow";
    case CertificateKind::ConditionD: return "condition_D";
    }
    return "?";
}

AdmissibilityCertificate check_weight_admissible(const WeightFunction& rho, const DomainSpec& domain,
                                                 std::span<const double> t_samples,
                                                 std::span<const double> shift_samples) {
    const double M = rho.M();
    const double omega = rho.omega();
    const Interval w = domain.window();
    Worst worst;
    std::size_t count = 0;
    for (double t : t_samples) {
        if (!w.contains(t)) continue;
        const double base = positive_sample(rho, t);
        for (double s : shift_samples) {
            const double shifted = t + s;
            if (!w.contains(shifted)) continue;
            const double bound = M * std::exp(omega * std::abs(s)) * positive_sample(rho, shifted);
            worst.offer(base / bound, t, s);
            ++count;
        }
    }
    return finish(CertificateKind::ScalarWeight, worst, M, omega, count,
                  lattice_scope(t_samples.size(), shift_samples.size()));
}

AdmissibilityCertificate check_lp_semiflow_admissible(const WeightFunction& rho1, const Semiflow& phi,
                                                      const DomainSpec& domain,
                                                      std::span<const double> t_samples,
                                                      std::span<const double> x_samples, double M,
                                                      double omega) {
    Worst worst;
    std::size_t count = 0;
    for (double t : t_samples) {
        for (double x : x_samples) {
            if (!domain.contains(x)) continue;
            const double y = phi.forward(t, x);
            if (!domain.contains(y)) {
                throw Error(ErrorKind::SemiflowDomain, phi.name() + " leaves the domain");
            }
            const double det = std::abs(phi.jac_det(t, x));
            ++count;
            if (det == 0.0) {
                worst.offer(kInf, x, t);
                continue;
            }
            const double bound = M * std::exp(omega * std::abs(t)) * positive_sample(rho1, y) * det;
            worst.offer(positive_sample(rho1, x) / bound, x, t);
        }
    }
    return finish(CertificateKind::LpSemiflow, worst, M, omega, count,
                  lattice_scope(t_samples.size(), x_samples.size()));
}

AdmissibilityCertificate check_c0_semiflow_admissible(const WeightFunction& rho, const Semiflow& phi,
                                                      const DomainSpec& domain,
                                                      std::span<const double> t_samples,
                                                      std::span<const double> x_samples,
                                                      std::span<const CompactBox> compacts, double M,
                                                      double omega) {
    Worst worst;
    std::size_t count = 0;
    std::vector<double> xs;
    for (double x : x_samples) {
        if (domain.contains(x)) xs.push_back(x);
    }
    std::sort(xs.begin(), xs.end());
    for (double t : t_samples) {
        for (double x : xs) {
            const double y = phi.forward(t, x);
            if (!domain.contains(y)) {
                throw Error(ErrorKind::SemiflowDomain, phi.name() + " leaves the domain");
            }
            const double bound = M * std::exp(omega * std::abs(t)) * positive_sample(rho, y);
            worst.offer(positive_sample(rho, x) / bound, x, t);
            ++count;
        }
    }
    // Compactness surrogate: the qualifying set must stay two local sample
    // spacings away from every open edge of the window.
    if (xs.size() >= 2) {
        const Interval w = domain.window();
        const double low_margin = 2.0 * (xs[1] - xs[0]);
        const double high_margin = 2.0 * (xs[xs.size() - 1] - xs[xs.size() - 2]);
        const double low_edge = domain.low_is_closed() ? -kInf : w.low + low_margin;
        const double high_edge = w.high - high_margin;
        for (const auto& K : compacts) {
            for (double delta : kDeltaLadder) {
                for (double t : t_samples) {
                    for (double x : xs) {
                        if (!K.contains(phi.forward(t, x))) continue;
                        if (positive_sample(rho, x) < delta) continue;
                        ++count;
                        if (x < low_edge || x > high_edge) worst.offer(kInf, x, t);
                    }
                }
            }
        }
    }
    return finish(CertificateKind::C0Semiflow, worst, M, omega, count,
                  lattice_scope(t_samples.size(), x_samples.size()));
}

AdmissibilityCertificate check_condition_D(const Semiflow& phi, std::span<const CompactBox> compacts,
                                           std::span<const double> t_samples,
                                           std::span<const double> x_samples) {
    std::vector<double> ts(t_samples.begin(), t_samples.end());
    std::sort(ts.begin(), ts.end());
    ts.erase(std::remove_if(ts.begin(), ts.end(), [](double t) { return !(t > 0.0); }), ts.end());
    if (ts.empty()) throw Error(ErrorKind::Structural, "condition (D) needs positive time samples");
    const double t_max = ts.back();

    Worst worst;
    std::vector<double> escapes;
    std::size_t count = 0;
    for (const auto& K : compacts) {
        // Latest sampled time at which some sampled image still meets K.
        std::optional<std::size_t> last_hit;
        std::optional<double> hit_point;
        for (std::size_t k = 0; k < ts.size(); ++k) {
            for (double x : x_samples) {
                ++count;
                if (K.contains(phi.forward(ts[k], x))) {
                    last_hit = k;
                    hit_point = x;
                    break;
                }
            }
        }
        double t0 = ts.front();
        if (last_hit) t0 = *last_hit + 1 < ts.size() ? ts[*last_hit + 1] : kInf;
        escapes.push_back(t0);
        worst.offer(t0 / t_max, hit_point.value_or(0.0), last_hit ? ts[*last_hit] : t0);
    }
    auto cert = finish(CertificateKind::ConditionD, worst, 1.0, 0.0, count,
                       lattice_scope(t_samples.size(), x_samples.size()));
    cert.escape_times = std::move(escapes);
    return cert;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = a;
        return out;
    }
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return out;
}

std::vector<double> geomspace(double a, double b, std::size_t n) {
    if (!(a > 0.0 && b > 0.0)) throw Error(ErrorKind::Structural, "geomspace needs positive ends");
    auto logs = linspace(std::log(a), std::log(b), n);
    for (auto& v : logs) v = std::exp(v);
    return logs;
}

} // namespace reclab
