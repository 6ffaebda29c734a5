// Condition-checker tests: exact margins on affine families, implication
// properties between the margin checks and the direct cone checks, series
// oracles for the width log-sum, and the two-order tail sum.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "srblab/conditions.hpp"
#include "srblab/error.hpp"
#include "srblab/families.hpp"

using namespace srblab;

namespace {
const SamplingGrid kSmallGrid{8, 8, 40};
}

TEST_CASE("hyperbolicity margins on affine families are exact") {
    const ConeParams cone{0.5, 2.0};
    auto rep = check_hyperbolicity(baker(2), cone, kSmallGrid);
    CHECK(rep.entry("unstable_cone").min_margin == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(rep.entry("unstable_expansion").min_margin == 0.0);
    CHECK(rep.entry("stable_cone").min_margin == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(rep.entry("stable_expansion").min_margin == 0.0);
    CHECK(rep.tail_note.empty());

    auto lrep = check_hyperbolicity(lueroth(), cone, kSmallGrid);
    CHECK(lrep.entry("unstable_expansion").min_margin == 0.0);
    CHECK(lrep.entry("unstable_expansion").worst_branch == 1);
    CHECK(lrep.entry("stable_expansion").min_margin == 0.0);
    CHECK(lrep.entry("unstable_cone").min_margin > 0.0);
    CHECK(lrep.entry("stable_cone").min_margin > 0.0);
    CHECK(!lrep.tail_note.empty());
}

TEST_CASE("direct cone checks reproduce the hand-computed ray images") {
    const ConeParams cone{0.5, 2.0};
    auto rep = check_cone_properties(baker(2), cone, kSmallGrid);
    CHECK(rep.entry("unstable_cone_image").min_margin == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(rep.entry("unstable_growth").min_margin == 0.0);
    CHECK(rep.entry("stable_cone_preimage").min_margin > 0.0);
    CHECK(rep.entry("stable_growth").min_margin == 0.0);

    // Branch 3 of the countable family has the diagonal derivative
    // [[12, 0], [0, 1/12]]; the ray (1, -1/2) maps to (12, -1/24).
    auto m = lueroth();
    const Jet j = m.f().jet(3, {0.3, 0.4});
    const Vec2 w = j.apply_d1({1.0, -0.5});
    CHECK(w.v1 == doctest::Approx(12.0));
    CHECK(w.v2 == doctest::Approx(-1.0 / 24.0));
    CHECK(0.5 * std::fabs(w.v1) - std::fabs(w.v2) > 0.0);
    CHECK(max_norm(w) - cone.K0 > 0.0);
}

TEST_CASE("nonnegative margins imply the cone and ratio properties hold") {
    struct Case {
        PiecewiseMap map;
        ConeParams cone;
    };
    const std::vector<Case> cases = {{baker(2), {0.5, 2.0}},
                                     {baker(5), {0.5, 2.0}},
                                     {lueroth(), {0.5, 2.0}},
                                     {perturbed_lueroth(0.01), {0.5, 1.9}}};
    for (const auto& c : cases) {
        auto hyp = check_hyperbolicity(c.map, c.cone, kSmallGrid);
        REQUIRE(hyp.all_nonnegative());
        auto cones = check_cone_properties(c.map, c.cone, kSmallGrid);
        CHECK(cones.all_nonnegative(1e-12));
        auto ratios = check_derivative_ratios(c.map, c.cone, kSmallGrid);
        CHECK(ratios.all_nonnegative(1e-12));
    }
}

TEST_CASE("derivative ratio margins match the constant-jet values") {
    auto rep = check_derivative_ratios(baker(2), {0.5, 2.0}, kSmallGrid);
    CHECK(rep.entry("shear_ratio").min_margin == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(rep.entry("transverse_ratio").min_margin == doctest::Approx(0.5).epsilon(1e-15));
    // Ratio |f2y|/|f1x| = 1/4 against the bound 1/K0^2 + alpha^2 = 1/2.
    CHECK(rep.entry("contraction_ratio").min_margin == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(rep.entry("contraction_ratio").worst_quantity == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("distortion supremum vanishes for affine families and is stable otherwise") {
    CHECK(check_distortion_bound(baker(2), kSmallGrid).entry("distortion_ratio").worst_quantity ==
          0.0);
    CHECK(check_distortion_bound(lueroth(), kSmallGrid).entry("distortion_ratio").worst_quantity ==
          0.0);

    auto m = perturbed_lueroth(0.005);
    const SamplingGrid g50{16, 16, 50};
    const SamplingGrid g100{16, 16, 100};
    const double s50 = check_distortion_bound(m, g50).entry("distortion_ratio").worst_quantity;
    const double s100 = check_distortion_bound(m, g100).entry("distortion_ratio").worst_quantity;
    CHECK(s50 > 0.0);
    CHECK(std::fabs(s100 - s50) <= 0.10 * std::max(s50, s100));
}

TEST_CASE("largest perturbation strength passing all margins") {
    // Frozen from a one-time sweep over eps = 0.001 k at this exact grid and
    // cone: every margin stays positive through eps = 0.050 (the unstable
    // expansion margin is ~0.1 - 2 eps) and goes negative at 0.051.
    const SamplingGrid grid{64, 64, 50};
    const ConeParams cone{0.5, 1.9};
    auto pass = check_hyperbolicity(perturbed_lueroth(0.050), cone, grid);
    for (const auto& e : pass.entries) CHECK(e.min_margin > 0.0);
    auto fail_rep = check_hyperbolicity(perturbed_lueroth(0.051), cone, grid);
    CHECK(fail_rep.entry("unstable_expansion").min_margin < 0.0);
}

TEST_CASE("largest passing expansion constant") {
    CHECK(largest_passing_K0(baker(2), 0.5, kSmallGrid) == doctest::Approx(2.0).epsilon(1e-15));
    auto m = perturbed_lueroth(0.01);
    const double k = largest_passing_K0(m, 0.5, kSmallGrid);
    CHECK(k > 1.0);
    auto pass = check_hyperbolicity(m, {0.5, k - 1e-9}, kSmallGrid);
    CHECK(pass.entry("unstable_expansion").min_margin >= 0.0);
    CHECK(pass.entry("stable_expansion").min_margin >= 0.0);
    auto fail_rep = check_hyperbolicity(m, {0.5, k + 1e-3}, kSmallGrid);
    const bool some_negative = fail_rep.entry("unstable_expansion").min_margin < 0.0 ||
                               fail_rep.entry("stable_expansion").min_margin < 0.0;
    CHECK(some_negative);
}

TEST_CASE("post tiling and strip disjointness") {
    for (auto m : {baker(2), lueroth(), perturbed_lueroth(0.01)}) {
        auto rep = check_partition(m, {4, 16, 60});
        CHECK(std::fabs(rep.entry("posts_disjoint").min_margin) < 1e-11);
        CHECK(rep.entry("posts_cover").min_margin > -1e-11);
        CHECK(rep.entry("strips_disjoint").min_margin > -1e-12);
    }
    auto rep = check_partition(baker(2), {4, 16, 60});
    CHECK(rep.entry("posts_cover").worst_quantity == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("width log series: dyadic value, series oracle, monotonicity") {
    auto b = check_width_logsum(baker(2), 100);
    CHECK(b.partial_sum == doctest::Approx(std::log(2.0)).epsilon(1e-13));
    CHECK(!b.diverging);

    // Oracle: branch n has constant width 1/(n(n+1)), so the series is
    // sum log(n(n+1)) / (n(n+1)), summed directly here.
    double oracle = 0.0;
    const long n_max = 1000000;
    for (long n = 1; n <= n_max; ++n) {
        const double m = static_cast<double>(n) * (n + 1);
        oracle += std::log(m) / m;
    }
    auto l = check_width_logsum(lueroth(), n_max);
    CHECK(l.partial_sum == doctest::Approx(oracle).epsilon(1e-3));
    CHECK(std::fabs(l.partial_sum - oracle) < 1e-6);
    CHECK(!l.diverging);
    CHECK(l.terms == n_max);

    const double s3 = check_width_logsum(lueroth(), 1000).partial_sum;
    const double s4 = check_width_logsum(lueroth(), 10000).partial_sum;
    const double s5 = check_width_logsum(lueroth(), 100000).partial_sum;
    CHECK(s3 <= s4);
    CHECK(s4 <= s5);
    CHECK(s5 <= l.partial_sum);
}

TEST_CASE("width log series handles super-exponentially small widths") {
    std::vector<double> w;
    double oracle = 0.0;
    for (int i = 1; i <= 40; ++i) {
        const double d = std::exp(-std::pow(2.0, i));
        w.push_back(d);
        if (d > 0.0) oracle += std::pow(2.0, i) * d;
    }
    auto rep = width_logsum_terms(w, w);
    CHECK(rep.partial_sum == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(!rep.diverging);

    // Constant terms never decrease, so the divergence flag must trip.
    std::vector<double> flat(200, 0.5);
    CHECK(width_logsum_terms(flat, flat).diverging);
}

TEST_CASE("tail sum: geometric closed form, empty sets, order invariance") {
    std::vector<double> x, y;
    for (int i = 1; i <= 60; ++i) {
        x.push_back(std::pow(2.0, -i));
        y.push_back(std::pow(2.0, -i));
    }
    CHECK(tail_sum(x, y, std::log(2.0)) == doctest::Approx(2.0).epsilon(1e-12));

    // 0.96 > exp(-0.05), so every D_n is empty.
    std::vector<double> big_y(x.size(), 0.96);
    CHECK(tail_sum(x, big_y, 0.05) == 0.0);

    // Width sequences of the countable family; the direct n-major double sum
    // is the independent order.
    std::vector<double> dx, dy;
    for (long n = 1; n <= 20000; ++n) {
        const double w = 1.0 / (static_cast<double>(n) * (n + 1));
        dx.push_back(w);
        dy.push_back(w);
    }
    const double eps = 0.5;
    const double grouped = tail_sum(dx, dy, eps);
    double direct = 0.0;
    long max_j = 0;
    std::vector<long> level(dx.size());
    for (std::size_t i = 0; i < dy.size(); ++i) {
        level[i] = static_cast<long>(std::floor(-std::log(dy[i]) / eps + 1e-9));
        max_j = std::max(max_j, level[i]);
    }
    for (long n = 1; n <= max_j; ++n)
        for (std::size_t i = 0; i < dx.size(); ++i)
            if (level[i] >= n) direct += dx[i];
    CHECK(grouped == doctest::Approx(direct).epsilon(1e-12));

    CHECK_THROWS_AS(tail_sum({1.0}, {0.5, 0.5}, 1.0), SrbError);
    CHECK_THROWS_AS(tail_sum({-1.0}, {0.5}, 1.0), SrbError);
    CHECK_THROWS_AS(tail_sum({1.0}, {1.5}, 1.0), SrbError);
    CHECK_THROWS_AS(tail_sum({1.0}, {0.5}, 0.0), SrbError);
}

TEST_CASE("report plumbing: entry lookup and grid validation") {
    auto rep = check_hyperbolicity(baker(2), {0.5, 2.0}, {2, 2, 2});
    CHECK_THROWS_AS(rep.entry("no_such_condition"), SrbError);
    const SamplingGrid bad{0, 4, 10};
    CHECK_THROWS_AS(check_hyperbolicity(baker(2), {0.5, 2.0}, bad), SrbError);
    CHECK(rep.entry("unstable_cone").samples == 2 * 2 * 2);
}
