#pragma once

#include <limits>
#include <string>

namespace reclab {

enum class DomainKind { HalfLine, Line, OpenBox };

const char* to_string(DomainKind kind);

struct Interval {
    double low = 0.0;
    double high = 0.0;

    double width() const { return high - low; }
    bool contains(double x) const { return x >= low && x <= high; }
};

/// One-dimensional domain with a truncation horizon for unbounded directions.
///
/// HalfLine is [0, inf), Line is (-inf, inf), OpenBox is (low, high) where
/// either end may be infinite. The computational window replaces every
/// infinite end by +-trunc.
class DomainSpec {
public:
    static constexpr double kDefaultTrunc = 200.0;
    static constexpr double kInf = std::numeric_limits<double>::infinity();

    static DomainSpec half_line(double trunc = kDefaultTrunc);
    static DomainSpec line(double trunc = kDefaultTrunc);
    static DomainSpec open_box(double low, double high, double trunc = kDefaultTrunc);

    DomainKind kind() const { return kind_; }
    Interval bounds() const { return {low_, high_}; }
    double trunc() const { return trunc_; }

    /// Truncated interval actually discretized.
    Interval window() const;

    /// True when x lies in the untruncated domain (open ends excluded).
    bool contains(double x) const;

    bool low_is_truncated() const { return low_ == -kInf; }
    bool high_is_truncated() const { return high_ == kInf; }
    /// Whether the lower end belongs to the domain ([0, inf) includes 0).
    bool low_is_closed() const { return kind_ == DomainKind::HalfLine; }

    std::string describe() const;

    friend bool operator==(const DomainSpec&, const DomainSpec&) = default;

private:
    DomainSpec(DomainKind kind, double low, double high, double trunc);

    DomainKind kind_;
    double low_;
    double high_;
    double trunc_;
};

} // namespace reclab
