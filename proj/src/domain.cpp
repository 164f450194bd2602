#include "reclab/domain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "reclab/error.hpp"

namespace reclab {

const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Structural: return "structural error";
    case ErrorKind::InvalidWeight: return "invalid weight";
    case ErrorKind::SemiflowDomain: return "semiflow domain error";
    case ErrorKind::InvalidRotation: return "invalid rotation";
    case ErrorKind::Size: return "size error";
    case ErrorKind::Numeric: return "numeric error";
    case ErrorKind::OracleUnavailable: return "oracle unavailable";
    case ErrorKind::ConstructionStalled: return "construction stalled";
    case ErrorKind::Precondition: return "precondition error";
    case ErrorKind::CriterionUnavailable: return "criterion unavailable";
    case ErrorKind::Validation: return "validation error";
    }
    return "error";
}

const char* to_string(DomainKind kind) {
    switch (kind) {
    case DomainKind::HalfLine: return "halfline";
    case DomainKind::Line: return "line";
    case DomainKind::OpenBox: return "openbox";
    }
    return "?";
}

DomainSpec::DomainSpec(DomainKind kind, double low, double high, double trunc)
    : kind_(kind), low_(low), high_(high), trunc_(trunc) {
    if (!(low < high)) {
        throw Error(ErrorKind::Structural, "domain requires low < high");
    }
    if ((std::isinf(low) || std::isinf(high)) && !(trunc > 0.0 && std::isfinite(trunc))) {
        throw Error(ErrorKind::Structural, "unbounded domain requires a finite trunc > 0");
    }
    auto w = window();
    if (!(w.low < w.high)) {
        throw Error(ErrorKind::Structural, "truncation leaves an empty window");
    }
}

DomainSpec DomainSpec::half_line(double trunc) { return {DomainKind::HalfLine, 0.0, kInf, trunc}; }

DomainSpec DomainSpec::line(double trunc) { return {DomainKind::Line, -kInf, kInf, trunc}; }

DomainSpec DomainSpec::open_box(double low, double high, double trunc) {
    return {DomainKind::OpenBox, low, high, trunc};
}

Interval DomainSpec::window() const {
    return {std::max(low_, -trunc_), std::min(high_, trunc_)};
}

bool DomainSpec::contains(double x) const {
    if (std::isnan(x)) return false;
    bool above = low_is_closed() ? x >= low_ : x > low_;
    return above && x < high_;
}

std::string DomainSpec::describe() const {
    std::ostringstream os;
    os << to_string(kind_) << "[" << low_ << ", " << high_ << "] trunc=" << trunc_;
    return os.str();
}

} // namespace reclab
