#include "srblab/families.hpp"

#include <cmath>
#include <numbers>

#include "srblab/solve.hpp"

namespace srblab {

namespace {

constexpr double kPi = std::numbers::pi;

// Shared lookup logic for the lueroth partition of (0,1]: branch n owns
// (1/(n+1), 1/n]; a point on a shared boundary goes to the branch on its
// right (the smaller index).
BranchLookup lueroth_locate(double u, long n_max) {
    BranchLookup out;
    if (u <= 0.0) {
        out.tail_truncated = true;
        out.boundary_adjacent = true;
        return out;
    }
    if (u >= 1.0) {
        out.index = 1;
        out.boundary_adjacent = true;
        return out;
    }
    long n = static_cast<long>(std::floor(1.0 / u));
    // floor(1/u) can land one off at representable boundaries; settle by the
    // defining inequalities 1/(n+1) < u <= 1/n.
    while (u * static_cast<double>(n) > 1.0) ++n;
    while (u * static_cast<double>(n + 1) <= 1.0) --n;
    const double r = 1.0 / static_cast<double>(n);
    const double l = 1.0 / static_cast<double>(n + 1);
    out.boundary_adjacent = (r - u) <= kBoundaryTol || (u - l) <= kBoundaryTol;
    if (u == r && n >= 2) --n; // exact right edge: branch on the right wins
    out.index = n;
    if (n > n_max) {
        out.tail_truncated = true;
        out.index = 0;
    }
    return out;
}

class BakerFamily final : public MapFamily {
public:
    explicit BakerFamily(int n) : n_(n) {}

    std::string name() const override { return "baker(" + std::to_string(n_) + ")"; }
    long max_branch() const override { return n_; }
    bool affine() const override { return true; }
    bool declares_disjoint_strips() const override { return true; }

    BranchLookup locate(Point2 z) const override {
        BranchLookup out;
        const double s = z.x * n_;
        long i = 1 + static_cast<long>(std::floor(s));
        if (i > n_) i = n_;
        if (i < 1) i = 1;
        const double lo = static_cast<double>(i - 1) / n_;
        const double hi = static_cast<double>(i) / n_;
        out.index = i;
        out.boundary_adjacent =
            (z.x - lo) <= kBoundaryTol || (hi - z.x) <= kBoundaryTol;
        return out;
    }

    Point2 forward(long i, Point2 z) const override {
        return {n_ * z.x - static_cast<double>(i - 1),
                (z.y + static_cast<double>(i - 1)) / n_};
    }

    Jet jet(long i, Point2 z) const override {
        Jet j;
        j.value = forward(i, z);
        j.d1[0][0] = n_;
        j.d1[1][1] = 1.0 / n_;
        return j;
    }

    Point2 inverse(long i, Point2 w) const override {
        return {(w.x + static_cast<double>(i - 1)) / n_,
                n_ * w.y - static_cast<double>(i - 1)};
    }

    double x_left(long i, double) const override {
        return static_cast<double>(i - 1) / n_;
    }
    double x_right(long i, double) const override {
        return static_cast<double>(i) / n_;
    }
    void strip_bounds(long i, double, double& y_bot, double& y_top) const override {
        y_bot = static_cast<double>(i - 1) / n_;
        y_top = static_cast<double>(i) / n_;
    }

private:
    double n_;
};

class LuerothFamily final : public MapFamily {
public:
    explicit LuerothFamily(long n_max) : n_max_(n_max) {}

    std::string name() const override { return "lueroth"; }
    long max_branch() const override { return n_max_; }
    bool affine() const override { return true; }
    bool declares_disjoint_strips() const override { return true; }

    BranchLookup locate(Point2 z) const override {
        return lueroth_locate(z.x, n_max_);
    }

    Point2 forward(long i, Point2 z) const override {
        const double m = mult(i);
        return {m * z.x - static_cast<double>(i),
                1.0 - 1.0 / static_cast<double>(i) + z.y / m};
    }

    Jet jet(long i, Point2 z) const override {
        Jet j;
        j.value = forward(i, z);
        const double m = mult(i);
        j.d1[0][0] = m;
        j.d1[1][1] = 1.0 / m;
        return j;
    }

    Point2 inverse(long i, Point2 w) const override {
        const double m = mult(i);
        return {(w.x + static_cast<double>(i)) / m,
                (w.y - (1.0 - 1.0 / static_cast<double>(i))) * m};
    }

    double x_left(long i, double) const override {
        return 1.0 / static_cast<double>(i + 1);
    }
    double x_right(long i, double) const override {
        return 1.0 / static_cast<double>(i);
    }
    void strip_bounds(long i, double, double& y_bot, double& y_top) const override {
        y_bot = 1.0 - 1.0 / static_cast<double>(i);
        y_top = 1.0 - 1.0 / static_cast<double>(i + 1);
    }

private:
    static double mult(long i) {
        return static_cast<double>(i) * static_cast<double>(i + 1);
    }

    long n_max_;
};

// Shear data for the perturbed family: value and all partials through second
// order of p and q at one point.
struct Shear {
    double v, dx, dy, dxx, dxy, dyy;
};

Shear shear_p(double x, double y) {
    const double sx = std::sin(kPi * x), cx = std::cos(kPi * x);
    const double sy = std::sin(kPi * y), cy = std::cos(kPi * y);
    Shear s;
    s.v = sx * (1.0 + cy) / (2.0 * kPi);
    s.dx = cx * (1.0 + cy) / 2.0;
    s.dy = -sx * sy / 2.0;
    s.dxx = -kPi * sx * (1.0 + cy) / 2.0;
    s.dxy = -kPi * cx * sy / 2.0;
    s.dyy = -kPi * sx * cy / 2.0;
    return s;
}

Shear shear_q(double x, double y) {
    const Shear t = shear_p(y, x); // q(x,y) = p(y,x)
    return {t.v, t.dy, t.dx, t.dyy, t.dxy, t.dxx};
}

class PerturbedLuerothFamily final : public MapFamily {
public:
    PerturbedLuerothFamily(double eps, long n_max) : eps_(eps), n_max_(n_max) {
        if (!(eps >= 0.0 && eps < 0.5))
            fail(Err::InvalidArgument, "perturbed_lueroth: eps must lie in [0, 0.5)");
    }

    std::string name() const override {
        return "perturbed_lueroth(" + std::to_string(eps_) + ")";
    }
    long max_branch() const override { return n_max_; }
    bool affine() const override { return false; }
    bool declares_disjoint_strips() const override { return true; }

    BranchLookup locate(Point2 z) const override {
        const double u = psi(z.x, z.y);
        return lueroth_locate(std::clamp(u, 0.0, 1.0), n_max_);
    }

    Point2 forward(long i, Point2 z) const override {
        const double m = mult(i);
        return {m * psi(z.x, z.y) - static_cast<double>(i),
                1.0 - 1.0 / static_cast<double>(i) + hshear(z.x, z.y) / m};
    }

    Jet jet(long i, Point2 z) const override {
        const double m = mult(i);
        const Shear p = shear_p(z.x, z.y), q = shear_q(z.x, z.y);
        Jet j;
        j.value = forward(i, z);
        j.d1[0][0] = m * (1.0 + eps_ * p.dx);
        j.d1[0][1] = m * eps_ * p.dy;
        j.d1[1][0] = eps_ * q.dx / m;
        j.d1[1][1] = (1.0 + eps_ * q.dy) / m;
        j.d2[0][0] = m * eps_ * p.dxx;
        j.d2[0][1] = m * eps_ * p.dxy;
        j.d2[0][2] = m * eps_ * p.dyy;
        j.d2[1][0] = eps_ * q.dxx / m;
        j.d2[1][1] = eps_ * q.dxy / m;
        j.d2[1][2] = eps_ * q.dyy / m;
        return j;
    }

    Point2 inverse(long i, Point2 w) const override {
        const double m = mult(i);
        const double pt = (w.x + static_cast<double>(i)) / m;            // psi target
        const double ht = (w.y - (1.0 - 1.0 / static_cast<double>(i))) * m; // h target
        double x = std::clamp(pt, 0.0, 1.0), y = std::clamp(ht, 0.0, 1.0);
        for (int it = 0; it < 50; ++it) {
            const Shear p = shear_p(x, y), q = shear_q(x, y);
            const double rx = x + eps_ * p.v - pt;
            const double ry = y + eps_ * q.v - ht;
            if (std::max(std::fabs(rx), std::fabs(ry)) < 1e-15) break;
            double dx, dy;
            solve2x2(1.0 + eps_ * p.dx, eps_ * p.dy, eps_ * q.dx,
                     1.0 + eps_ * q.dy, rx, ry, dx, dy);
            x -= dx;
            y -= dy;
        }
        return {x, y};
    }

    double x_left(long i, double y) const override {
        return boundary(1.0 / static_cast<double>(i + 1), y);
    }
    double x_right(long i, double y) const override {
        return boundary(1.0 / static_cast<double>(i), y);
    }
    void strip_bounds(long i, double, double& y_bot, double& y_top) const override {
        y_bot = 1.0 - 1.0 / static_cast<double>(i);
        y_top = 1.0 - 1.0 / static_cast<double>(i + 1);
    }

private:
    static double mult(long i) {
        return static_cast<double>(i) * static_cast<double>(i + 1);
    }

    double psi(double x, double y) const { return x + eps_ * shear_p(x, y).v; }
    double hshear(double x, double y) const { return y + eps_ * shear_q(x, y).v; }

    // x with psi(x, y) = target, Newton from the unperturbed abscissa.
    double boundary(double target, double y) const {
        double x = target - eps_ * shear_p(target, y).v;
        for (int it = 0; it < 30; ++it) {
            const Shear p = shear_p(x, y);
            const double r = x + eps_ * p.v - target;
            if (std::fabs(r) < 1e-16) break;
            x -= r / (1.0 + eps_ * p.dx);
        }
        return x;
    }

    double eps_;
    long n_max_;
};

} // namespace

PiecewiseMap baker(int branches, ConeParams cone) {
    if (branches < 2)
        fail(Err::InvalidArgument, "baker: need at least two branches");
    cone.validate();
    return {std::make_shared<BakerFamily>(branches), cone, 1.0};
}

PiecewiseMap lueroth(long n_max, ConeParams cone) {
    if (n_max < 2) fail(Err::InvalidArgument, "lueroth: N_max must be >= 2");
    cone.validate();
    return {std::make_shared<LuerothFamily>(n_max), cone, 1.0};
}

PiecewiseMap perturbed_lueroth(double eps, long n_max, ConeParams cone) {
    if (n_max < 2)
        fail(Err::InvalidArgument, "perturbed_lueroth: N_max must be >= 2");
    cone.validate();
    return {std::make_shared<PerturbedLuerothFamily>(eps, n_max), cone, 1.0};
}

} // namespace srblab
