#include "srblab/expr_family.hpp"

#include <algorithm>
#include <cmath>

#include "srblab/expr.hpp"
#include "srblab/families.hpp"

namespace srblab {

namespace {

class ExprFamily final : public MapFamily {
public:
    ExprFamily(const ExprFamilyConfig& cfg) : cfg_(cfg) {
        if (cfg.n_max < 1 || cfg.n_max > 100000)
            fail(Err::ConfigInvalid,
                 "custom family: branch count must lie in [1, 100000]");
        auto req = [](const std::string& src, const char* field) {
            if (src.empty())
                fail(Err::ConfigInvalid,
                     std::string("custom family: missing expression '") + field + "'");
            return Expression::parse(src);
        };
        xl_ = req(cfg.x_left, "x_left");
        xr_ = req(cfg.x_right, "x_right");
        f_[0] = req(cfg.f1, "f1");
        f_[1] = req(cfg.f2, "f2");
        d1_[0][0] = req(cfg.f1x, "f1x");
        d1_[0][1] = req(cfg.f1y, "f1y");
        d1_[1][0] = req(cfg.f2x, "f2x");
        d1_[1][1] = req(cfg.f2y, "f2y");
        d2_[0][0] = req(cfg.f1xx, "f1xx");
        d2_[0][1] = req(cfg.f1xy, "f1xy");
        d2_[0][2] = req(cfg.f1yy, "f1yy");
        d2_[1][0] = req(cfg.f2xx, "f2xx");
        d2_[1][1] = req(cfg.f2xy, "f2xy");
        d2_[1][2] = req(cfg.f2yy, "f2yy");
    }

    std::string name() const override { return cfg_.label; }
    long max_branch() const override { return cfg_.n_max; }
    bool affine() const override { return cfg_.affine; }
    bool declares_disjoint_strips() const override {
        return cfg_.disjoint_strips;
    }

    BranchLookup locate(Point2 z) const override {
        // Posts tile [0,1]; half-open membership [x_left, x_right) sends a
        // shared edge to the branch on its right automatically. The global
        // right edge (x_right == 1) keeps its own branch.
        BranchLookup out;
        for (long i = 1; i <= cfg_.n_max; ++i) {
            const double lo = x_left(i, z.y), hi = x_right(i, z.y);
            const bool inside =
                (z.x >= lo && z.x < hi) || (z.x == hi && hi >= 1.0 - kBoundaryTol);
            if (!inside) continue;
            out.index = i;
            out.boundary_adjacent =
                std::min(z.x - lo, hi - z.x) <= kBoundaryTol;
            return out;
        }
        out.tail_truncated = true;
        return out;
    }

    Point2 forward(long i, Point2 z) const override {
        const double n = static_cast<double>(i);
        return {f_[0].eval(z.x, z.y, n), f_[1].eval(z.x, z.y, n)};
    }

    Jet jet(long i, Point2 z) const override {
        const double n = static_cast<double>(i);
        Jet j;
        j.value = forward(i, z);
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) j.d1[a][b] = d1_[a][b].eval(z.x, z.y, n);
            for (int b = 0; b < 3; ++b) j.d2[a][b] = d2_[a][b].eval(z.x, z.y, n);
        }
        return j;
    }

    double x_left(long i, double y) const override {
        return xl_.eval(0.0, y, static_cast<double>(i));
    }
    double x_right(long i, double y) const override {
        return xr_.eval(0.0, y, static_cast<double>(i));
    }

private:
    ExprFamilyConfig cfg_;
    Expression xl_, xr_;
    Expression f_[2];
    Expression d1_[2][2];
    Expression d2_[2][3];
};

} // namespace

PiecewiseMap custom_family(const ExprFamilyConfig& cfg, ConeParams cone,
                           double C0) {
    cone.validate();
    return {std::make_shared<ExprFamily>(cfg), cone, C0};
}

} // namespace srblab
