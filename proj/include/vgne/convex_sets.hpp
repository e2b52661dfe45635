#pragma once

#include "vgne/types.hpp"

#include <utility>
#include <variant>
#include <vector>

namespace vgne {

class ConvexSet;

struct FullSpace {
    Index dim = 0;
};

/// Axis-aligned box; entries of lower/upper may be -inf/+inf.
struct Box {
    Vector lower;
    Vector upper;
};

struct NonnegOrthant {
    Index dim = 0;
};

struct Product {
    std::vector<ConvexSet> factors;
};

/// Closed convex set of one of the shapes the dynamics need. Every variant is
/// a (possibly unbounded) box once flattened, so the bounds are cached at
/// construction and all projections run componentwise.
class ConvexSet {
public:
    using Shape = std::variant<FullSpace, Box, NonnegOrthant, Product>;

    ConvexSet() : ConvexSet(FullSpace{0}) {}
    explicit ConvexSet(Shape shape);

    static ConvexSet full_space(Index dim) { return ConvexSet(FullSpace{dim}); }
    static ConvexSet box(Vector lower, Vector upper) { return ConvexSet(Box{std::move(lower), std::move(upper)}); }
    static ConvexSet nonneg_orthant(Index dim) { return ConvexSet(NonnegOrthant{dim}); }
    static ConvexSet product(std::vector<ConvexSet> factors) { return ConvexSet(Product{std::move(factors)}); }

    Index dim() const { return lower_.size(); }
    const Shape& shape() const { return shape_; }

    /// Flattened bounds.
    const Vector& lower() const { return lower_; }
    const Vector& upper() const { return upper_; }

    bool is_full_space() const;
    bool contains(const VectorRef& x, double tol = kMembershipTol) const;

    /// Largest coordinate distance of x outside the set (0 when inside).
    double violation(const VectorRef& x) const;

private:
    Shape shape_;
    Vector lower_;
    Vector upper_;
};

/// Euclidean projection onto the set.
template <typename Derived>
Vector project(const ConvexSet& set, const Eigen::MatrixBase<Derived>& v) {
    require_dim(v.size(), set.dim(), "project");
    return v.cwiseMax(set.lower()).cwiseMin(set.upper());
}

/// Projection of v onto the tangent cone of the set at x.
///
/// A coordinate counts as sitting on a face when it is within kMembershipTol of
/// the bound; on a face, the component pointing outward is zeroed.
/// Throws DimensionError on size mismatch and std::domain_error if x is not in
/// the set.
Vector tangent_project(const ConvexSet& set, const VectorRef& x, const VectorRef& v);

struct MoreauSplit {
    Vector tangent;  // proj onto T_S(x)
    Vector normal;   // proj onto N_S(x), equal to v - tangent
};

MoreauSplit moreau_decompose(const ConvexSet& set, const VectorRef& x, const VectorRef& v);

}  // namespace vgne
