#include "vgne/convex_sets.hpp"

#include <cmath>
#include <stdexcept>

namespace vgne {

namespace {

struct Bounds {
    Vector lower;
    Vector upper;
};

Bounds flatten(const ConvexSet::Shape& shape) {
    return std::visit(
        [](const auto& s) -> Bounds {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, FullSpace>) {
                if (s.dim < 0) throw std::invalid_argument("FullSpace: negative dimension");
                return {Vector::Constant(s.dim, -kInf), Vector::Constant(s.dim, kInf)};
            } else if constexpr (std::is_same_v<T, Box>) {
                require_dim(s.upper.size(), s.lower.size(), "Box bounds");
                for (Index k = 0; k < s.lower.size(); ++k) {
                    if (std::isnan(s.lower[k]) || std::isnan(s.upper[k]) || s.lower[k] > s.upper[k] ||
                        s.lower[k] == kInf || s.upper[k] == -kInf) {
                        throw std::invalid_argument("Box: require lower <= upper with a nonempty interval at index " +
                                                    std::to_string(k));
                    }
                }
                return {s.lower, s.upper};
            } else if constexpr (std::is_same_v<T, NonnegOrthant>) {
                if (s.dim < 0) throw std::invalid_argument("NonnegOrthant: negative dimension");
                return {Vector::Zero(s.dim), Vector::Constant(s.dim, kInf)};
            } else {
                Index total = 0;
                for (const auto& f : s.factors) total += f.dim();
                Bounds b{Vector(total), Vector(total)};
                Index offset = 0;
                for (const auto& f : s.factors) {
                    b.lower.segment(offset, f.dim()) = f.lower();
                    b.upper.segment(offset, f.dim()) = f.upper();
                    offset += f.dim();
                }
                return b;
            }
        },
        shape);
}

void require_member(const ConvexSet& set, const VectorRef& x, const char* what) {
    require_dim(x.size(), set.dim(), what);
    if (!set.contains(x)) {
        throw std::domain_error(std::string(what) + ": base point lies outside the set (violation " +
                                std::to_string(set.violation(x)) + ")");
    }
}

}  // namespace

ConvexSet::ConvexSet(Shape shape) : shape_(std::move(shape)) {
    Bounds b = flatten(shape_);
    lower_ = std::move(b.lower);
    upper_ = std::move(b.upper);
}

bool ConvexSet::is_full_space() const {
    return (lower_.array() == -kInf).all() && (upper_.array() == kInf).all();
}

bool ConvexSet::contains(const VectorRef& x, double tol) const {
    require_dim(x.size(), dim(), "contains");
    return ((x - lower_).array() >= -tol).all() && ((upper_ - x).array() >= -tol).all();
}

double ConvexSet::violation(const VectorRef& x) const {
    require_dim(x.size(), dim(), "violation");
    double worst = 0.0;
    for (Index k = 0; k < x.size(); ++k) {
        worst = std::max({worst, lower_[k] - x[k], x[k] - upper_[k]});
    }
    return worst;
}

Vector tangent_project(const ConvexSet& set, const VectorRef& x, const VectorRef& v) {
    require_dim(v.size(), set.dim(), "tangent_project");
    require_member(set, x, "tangent_project");
    Vector t = v;
    const Vector& lo = set.lower();
    const Vector& hi = set.upper();
    for (Index k = 0; k < t.size(); ++k) {
        if (t[k] < 0.0 && x[k] - lo[k] <= kMembershipTol) t[k] = 0.0;
        else if (t[k] > 0.0 && hi[k] - x[k] <= kMembershipTol) t[k] = 0.0;
    }
    return t;
}

MoreauSplit moreau_decompose(const ConvexSet& set, const VectorRef& x, const VectorRef& v) {
    MoreauSplit split;
    split.tangent = tangent_project(set, x, v);
    split.normal = v - split.tangent;
    return split;
}

}  // namespace vgne
