#include "reclab/space.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <utility>

#include "reclab/error.hpp"

namespace reclab {

namespace {

std::uint64_t next_space_id() {
    static std::atomic<std::uint64_t> counter{1};
    return counter.fetch_add(1);
}

constexpr double kSnap = 1e-9;

} // namespace

NormMode NormMode::lp(double p) {
    if (!(p >= 1.0) || !std::isfinite(p)) {
        throw Error(ErrorKind::Validation, "Lp mode requires finite p >= 1");
    }
    return {Kind::Lp, p};
}

// ---------------------------------------------------------------- GridFunction

GridFunction::GridFunction(std::uint64_t space_id, std::vector<Complex> values, bool truncated)
    : space_id_(space_id), values_(std::move(values)), truncated_(truncated) {
    for (const auto& v : values_) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            throw Error(ErrorKind::Numeric, "grid function entries must be finite");
        }
    }
}

GridFunction GridFunction::with_truncated(bool flag) const {
    GridFunction copy = *this;
    copy.truncated_ = flag;
    return copy;
}

void GridFunction::require_same_space(const GridFunction& other) const {
    if (space_id_ != other.space_id_ || values_.size() != other.values_.size()) {
        throw Error(ErrorKind::Structural, "grid functions belong to different spaces");
    }
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
    require_same_space(other);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    truncated_ = truncated_ || other.truncated_;
    return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
    require_same_space(other);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    truncated_ = truncated_ || other.truncated_;
    return *this;
}

GridFunction& GridFunction::operator*=(Complex alpha) {
    for (auto& v : values_) v *= alpha;
    return *this;
}

bool GridFunction::same_values(const GridFunction& other) const {
    return space_id_ == other.space_id_ && values_ == other.values_;
}

// ------------------------------------------------------------ WeightedGridSpace

struct WeightedGridSpace::Data {
    std::uint64_t id = 0;
    DomainSpec domain = DomainSpec::half_line();
    NormMode mode;
    double h = 0.0;
    std::vector<double> points;
    std::vector<double> quad;
    std::vector<double> rho;
    std::string weight_label;
    std::vector<WeightedGridSpace> components;
};

WeightedGridSpace::WeightedGridSpace(std::shared_ptr<const Data> data) : data_(std::move(data)) {}

WeightedGridSpace WeightedGridSpace::uniform(const DomainSpec& domain, std::size_t n_points,
                                             NormMode mode, const WeightFunction& weight) {
    if (n_points < 2) throw Error(ErrorKind::Structural, "grid needs at least 2 points");
    if (mode.kind == NormMode::Kind::Lp) (void)NormMode::lp(mode.p);
    auto data = std::make_shared<Data>();
    data->id = next_space_id();
    data->domain = domain;
    data->mode = mode;
    const Interval w = domain.window();
    data->h = w.width() / static_cast<double>(n_points);
    data->points.resize(n_points);
    data->quad.assign(n_points, data->h);
    data->rho.resize(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
        double x = w.low + (static_cast<double>(i) + 0.5) * data->h;
        data->points[i] = x;
        data->rho[i] = weight(x);
    }
    data->weight_label = weight.label();
    return WeightedGridSpace(std::move(data));
}

WeightedGridSpace WeightedGridSpace::with_spacing(const DomainSpec& domain, double h, NormMode mode,
                                                  const WeightFunction& weight) {
    if (!(h > 0.0)) throw Error(ErrorKind::Structural, "grid spacing must be positive");
    double cells = domain.window().width() / h;
    return uniform(domain, static_cast<std::size_t>(std::llround(cells)), mode, weight);
}

WeightedGridSpace WeightedGridSpace::coordinates(std::size_t n, NormMode mode) {
    if (n < 1) throw Error(ErrorKind::Structural, "coordinate space needs n >= 1");
    if (mode.kind == NormMode::Kind::Lp) (void)NormMode::lp(mode.p);
    auto data = std::make_shared<Data>();
    data->id = next_space_id();
    data->domain = DomainSpec::open_box(0.0, static_cast<double>(n));
    data->mode = mode;
    data->h = 1.0;
    data->points.resize(n);
    for (std::size_t i = 0; i < n; ++i) data->points[i] = static_cast<double>(i) + 0.5;
    data->quad.assign(n, 1.0);
    data->rho.assign(n, 1.0);
    data->weight_label = "unit";
    return WeightedGridSpace(std::move(data));
}

WeightedGridSpace WeightedGridSpace::product(const WeightedGridSpace& a, const WeightedGridSpace& b) {
    auto data = std::make_shared<Data>();
    data->id = next_space_id();
    data->domain = a.domain();
    data->mode = a.mode();
    data->h = a.spacing();
    for (const auto* s : {&a, &b}) {
        data->points.insert(data->points.end(), s->points().begin(), s->points().end());
        data->quad.insert(data->quad.end(), s->quad_weights().begin(), s->quad_weights().end());
        data->rho.insert(data->rho.end(), s->weight_samples().begin(), s->weight_samples().end());
    }
    data->weight_label = a.weight_label() + "(+)" + b.weight_label();
    data->components = {a, b};
    return WeightedGridSpace(std::move(data));
}

std::uint64_t WeightedGridSpace::id() const { return data_->id; }
std::size_t WeightedGridSpace::size() const { return data_->points.size(); }
const DomainSpec& WeightedGridSpace::domain() const { return data_->domain; }
NormMode WeightedGridSpace::mode() const { return data_->mode; }
double WeightedGridSpace::spacing() const { return data_->h; }
std::span<const double> WeightedGridSpace::points() const { return data_->points; }
std::span<const double> WeightedGridSpace::quad_weights() const { return data_->quad; }
std::span<const double> WeightedGridSpace::weight_samples() const { return data_->rho; }
const std::string& WeightedGridSpace::weight_label() const { return data_->weight_label; }
bool WeightedGridSpace::is_product() const { return !data_->components.empty(); }
std::span<const WeightedGridSpace> WeightedGridSpace::components() const {
    return data_->components;
}

GridFunction WeightedGridSpace::component(const GridFunction& f, std::size_t which) const {
    require_member(f);
    if (!is_product() || which > 1) throw Error(ErrorKind::Structural, "not a product component");
    const auto& parts = data_->components;
    std::size_t offset = which == 0 ? 0 : parts[0].size();
    auto first = f.values().begin() + static_cast<std::ptrdiff_t>(offset);
    std::vector<Complex> values(first, first + static_cast<std::ptrdiff_t>(parts[which].size()));
    return GridFunction(parts[which].id(), std::move(values), f.truncated());
}

GridFunction WeightedGridSpace::join(const GridFunction& a, const GridFunction& b) const {
    if (!is_product()) throw Error(ErrorKind::Structural, "join requires a product space");
    data_->components[0].require_member(a);
    data_->components[1].require_member(b);
    std::vector<Complex> values(a.values().begin(), a.values().end());
    values.insert(values.end(), b.values().begin(), b.values().end());
    return GridFunction(id(), std::move(values), a.truncated() || b.truncated());
}

GridFunction WeightedGridSpace::zeros() const {
    return GridFunction(id(), std::vector<Complex>(size()));
}

GridFunction WeightedGridSpace::sample(const std::function<Complex(double)>& fn) const {
    std::vector<Complex> values(size());
    for (std::size_t i = 0; i < size(); ++i) values[i] = fn(data_->points[i]);
    return GridFunction(id(), std::move(values));
}

GridFunction WeightedGridSpace::from_values(std::vector<Complex> values) const {
    if (values.size() != size()) throw Error(ErrorKind::Structural, "value count does not match grid");
    return GridFunction(id(), std::move(values));
}

GridFunction WeightedGridSpace::basis(std::size_t j) const {
    if (j >= size()) throw Error(ErrorKind::Structural, "basis index out of range");
    std::vector<Complex> values(size());
    values[j] = 1.0;
    return GridFunction(id(), std::move(values));
}

void WeightedGridSpace::require_member(const GridFunction& f) const {
    if (f.space_id() != id() || f.size() != size()) {
        throw Error(ErrorKind::Structural, "grid function does not belong to this space");
    }
}

Stencil WeightedGridSpace::locate(double x) const {
    if (is_product()) throw Error(ErrorKind::Structural, "point reads are undefined on product spaces");
    const Interval w = data_->domain.window();
    const double slack = 1e-12 * std::max(1.0, std::abs(x));
    Stencil st;
    if (x < w.low - slack || x > w.high + slack) {
        st.outside = true;
        return st;
    }
    const auto n = static_cast<std::ptrdiff_t>(size());
    const double s = (x - data_->points[0]) / data_->h;
    const double r = std::nearbyint(s);
    auto single = [&st](std::ptrdiff_t k) {
        st.i0 = st.i1 = static_cast<std::size_t>(k);
        st.w0 = 1.0;
        st.w1 = 0.0;
        return st;
    };
    if (std::abs(s - r) <= kSnap) {
        return single(std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(r), 0, n - 1));
    }
    const double fl = std::floor(s);
    const auto i = static_cast<std::ptrdiff_t>(fl);
    if (i < 0) return single(0);
    if (i >= n - 1) return single(n - 1);
    st.i0 = static_cast<std::size_t>(i);
    st.i1 = st.i0 + 1;
    st.w1 = s - fl;
    st.w0 = 1.0 - st.w1;
    return st;
}

PointRead WeightedGridSpace::read(const GridFunction& f, double x) const {
    const Stencil st = locate(x);
    if (st.outside) return {Complex{}, true};
    const auto vals = f.values();
    if (st.w1 == 0.0) return {vals[st.i0], false};
    return {st.w0 * vals[st.i0] + st.w1 * vals[st.i1], false};
}

// ------------------------------------------------------------------ norms

double norm(const WeightedGridSpace& space, const GridFunction& f) {
    space.require_member(f);
    if (space.is_product()) {
        double best = 0.0;
        for (std::size_t k = 0; k < 2; ++k) {
            best = std::max(best, norm(space.components()[k], space.component(f, k)));
        }
        return best;
    }
    const auto vals = f.values();
    const auto rho = space.weight_samples();
    const NormMode mode = space.mode();
    if (mode.is_sup()) {
        double best = 0.0;
        for (std::size_t i = 0; i < vals.size(); ++i) best = std::max(best, std::abs(vals[i]) * rho[i]);
        return best;
    }
    const auto w = space.quad_weights();
    double sum = 0.0;
    if (mode.p == 1.0) {
        for (std::size_t i = 0; i < vals.size(); ++i) sum += std::abs(vals[i]) * rho[i] * w[i];
        return sum;
    }
    if (mode.p == 2.0) {
        for (std::size_t i = 0; i < vals.size(); ++i) sum += std::norm(vals[i]) * rho[i] * w[i];
        return std::sqrt(sum);
    }
    for (std::size_t i = 0; i < vals.size(); ++i) {
        sum += std::pow(std::abs(vals[i]), mode.p) * rho[i] * w[i];
    }
    return std::pow(sum, 1.0 / mode.p);
}

double distance(const WeightedGridSpace& space, const GridFunction& f, const GridFunction& g) {
    space.require_member(f);
    space.require_member(g);
    return norm(space, f - g);
}

GridFunction indicator(const WeightedGridSpace& space, double a, double b) {
    return space.sample([a, b](double x) { return (x >= a && x <= b) ? Complex{1.0} : Complex{}; });
}

GridFunction smooth_bump(const WeightedGridSpace& space, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    return space.sample([mid, half](double x) {
        double u = (x - mid) / half;
        if (std::abs(u) >= 1.0) return Complex{};
        return Complex{std::exp(1.0 - 1.0 / (1.0 - u * u))};
    });
}

GridFunction hat(const WeightedGridSpace& space, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    return space.sample([mid, half](double x) {
        return Complex{std::max(0.0, 1.0 - std::abs(x - mid) / half)};
    });
}

} // namespace reclab
