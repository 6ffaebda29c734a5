// Piecewise-smooth maps of the unit square Q = [0,1]^2.
//
// A map is a countable (possibly infinite) collection of branches f_i, each a
// diffeomorphism from a full-height post E_i (the region between two steep
// boundary curves x_left(y), x_right(y)) onto a full-width strip S_i. The
// MapFamily interface exposes lazy per-branch evaluation: nothing is stored
// per branch, so countable families cost O(1) memory and enumeration is
// explicitly truncated at max_branch().
//
// Branch indices are 1-based. Points on shared post boundaries resolve to the
// branch on the right and are flagged boundary_adjacent; points past the
// enumerable tail are flagged tail_truncated.
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "srblab/geometry.hpp"

namespace srblab {

struct BranchLookup {
    long index = 0;
    bool boundary_adjacent = false;
    bool tail_truncated = false;
};

class MapFamily {
public:
    virtual ~MapFamily() = default;

    virtual std::string name() const = 0;

    // Largest enumerable branch index (tail truncation limit).
    virtual long max_branch() const = 0;

    // True when every branch is affine with y-independent post boundaries.
    // Enables exact cylinder arithmetic and d2 == 0 shortcuts.
    virtual bool affine() const = 0;

    // Declared at construction; required by the integral entropy route.
    virtual bool declares_disjoint_strips() const = 0;

    virtual BranchLookup locate(Point2 z) const = 0;

    virtual Point2 forward(long i, Point2 z) const = 0;
    virtual Jet jet(long i, Point2 z) const = 0;

    // Inverse of branch i on (a neighborhood of) its strip. The default
    // nests two monotone 1-D solves and needs only forward values and jets.
    virtual Point2 inverse(long i, Point2 w) const;

    virtual double x_left(long i, double y) const = 0;
    virtual double x_right(long i, double y) const = 0;

    // Strip boundary curves at abscissa x. The default maps the post's
    // bottom and top edges forward and orders the two values.
    virtual void strip_bounds(long i, double x, double& y_bot,
                              double& y_top) const;

    // Human-readable branch name for reports ("3", or "(1,2)" for powers).
    virtual std::string branch_label(long i) const;

    // Loose domain guard for jet evaluation: the post slice widened by a
    // quarter of its width (analytic extension neighborhood).
    virtual bool in_extended_domain(long i, Point2 z) const;
};

// A family together with its cone parameters and declared distortion bound.
struct PiecewiseMap {
    std::shared_ptr<const MapFamily> fam;
    ConeParams cone;
    double C0 = 1.0;

    const MapFamily& f() const { return *fam; }
};

// --- branch-level operations ------------------------------------------------

// Branch lookup honoring the half-open convention. Throws TailTruncated when
// require_branch is set and z lies beyond the enumerable tail.
BranchLookup branch_of(const PiecewiseMap& map, Point2 z,
                       bool require_branch = true);

// Horizontal width of post E_i at height z.y.
double zwidth(const PiecewiseMap& map, long i, Point2 z);

// Jet of branch i at z; OutOfDomain when z leaves the extension neighborhood.
Jet jet_at(const PiecewiseMap& map, long i, Point2 z);

// --- composed maps ----------------------------------------------------------

// The t-th power of a map as a PiecewiseMap whose branches are itineraries of
// length t. Enumeration is capped so that the enumerable branch count stays
// within depth_limit; lookups beyond the cap flag tail_truncated. Cone
// expansion updates to K0^t.
PiecewiseMap power_map(const PiecewiseMap& map, int t, long depth_limit = 4096);

class PowerFamily : public MapFamily {
public:
    PowerFamily(std::shared_ptr<const MapFamily> base, int t, long depth_limit);

    std::string name() const override;
    long max_branch() const override;
    bool affine() const override { return base_->affine(); }
    bool declares_disjoint_strips() const override { return false; }
    BranchLookup locate(Point2 z) const override;
    Point2 forward(long i, Point2 z) const override;
    Jet jet(long i, Point2 z) const override;
    Point2 inverse(long i, Point2 w) const override;
    double x_left(long i, double y) const override;
    double x_right(long i, double y) const override;
    std::string branch_label(long i) const override;
    bool in_extended_domain(long i, Point2 z) const override;

    int power() const { return t_; }
    long alphabet() const { return alphabet_; }
    const MapFamily& base() const { return *base_; }

    // Mixed-radix bijection between composite ids and itineraries over the
    // capped alphabet.
    std::vector<long> itinerary_of(long i) const;
    long id_of(const std::vector<long>& it) const;

private:
    std::shared_ptr<const MapFamily> base_;
    int t_;
    long alphabet_;
};

// Horizontal slice of the cylinder E_{it[0] ... it[k]} at height y, computed
// by narrowing the post slice of it[0] through each successive constraint.
// Affine families take an exact linear-pullback path. Throws EmptyCylinder
// when a constraint admits no solution.
void cylinder_slice(const MapFamily& fam, const std::vector<long>& it, double y,
                    double& lo, double& hi);

} // namespace srblab
