#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "srblab/expr.hpp"
#include "srblab/geometry.hpp"
#include "srblab/rng.hpp"
#include "srblab/solve.hpp"

using namespace srblab;

TEST_CASE("max norm and cones") {
    CHECK(max_norm({3.0, -4.0}) == 4.0);
    CHECK(max_norm({-5.0, 2.0}) == 5.0);
    CHECK(in_unstable_cone({1.0, 0.5}, 0.5));
    CHECK(!in_unstable_cone({1.0, 0.51}, 0.5));
    CHECK(in_stable_cone({0.5, 1.0}, 0.5));
    CHECK(!in_stable_cone({0.51, -1.0}, 0.5));
}

TEST_CASE("cone params validate") {
    const ConeParams bad_alpha{1.5, 2.0}, bad_k0{0.5, 0.9}, good{0.5, 2.0};
    CHECK_THROWS_AS(bad_alpha.validate(), SrbError);
    CHECK_THROWS_AS(bad_k0.validate(), SrbError);
    CHECK_NOTHROW(good.validate());
}

TEST_CASE("jet composition matches the hand-expanded chain rule") {
    // inner g and outer f with full second-order data, nothing special about
    // the numbers; the expansion below is written out independently.
    Jet g;
    g.value = {0.3, 0.7};
    double gd1[2][2] = {{1.2, -0.4}, {0.5, 2.0}};
    double gd2[2][3] = {{0.3, -0.2, 0.8}, {1.1, 0.6, -0.5}};
    Jet f;
    f.value = {0.9, 0.1};
    double fd1[2][2] = {{-0.7, 1.5}, {2.2, 0.3}};
    double fd2[2][3] = {{0.4, 1.3, -0.9}, {-0.6, 0.2, 1.7}};
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) { g.d1[a][b] = gd1[a][b]; f.d1[a][b] = fd1[a][b]; }
        for (int b = 0; b < 3; ++b) { g.d2[a][b] = gd2[a][b]; f.d2[a][b] = fd2[a][b]; }
    }

    const Jet h = compose_jets(f, g);

    for (int i = 0; i < 2; ++i) {
        // h_ix = f_ix g_1x + f_iy g_2x, h_iy = f_ix g_1y + f_iy g_2y
        CHECK(h.d1[i][0] == doctest::Approx(fd1[i][0] * gd1[0][0] + fd1[i][1] * gd1[1][0]).epsilon(1e-14));
        CHECK(h.d1[i][1] == doctest::Approx(fd1[i][0] * gd1[0][1] + fd1[i][1] * gd1[1][1]).epsilon(1e-14));
        // h_ixx = f_ixx g1x^2 + 2 f_ixy g1x g2x + f_iyy g2x^2 + f_ix g1xx + f_iy g2xx
        const double hxx = fd2[i][0] * gd1[0][0] * gd1[0][0] +
                           2 * fd2[i][1] * gd1[0][0] * gd1[1][0] +
                           fd2[i][2] * gd1[1][0] * gd1[1][0] +
                           fd1[i][0] * gd2[0][0] + fd1[i][1] * gd2[1][0];
        const double hyy = fd2[i][0] * gd1[0][1] * gd1[0][1] +
                           2 * fd2[i][1] * gd1[0][1] * gd1[1][1] +
                           fd2[i][2] * gd1[1][1] * gd1[1][1] +
                           fd1[i][0] * gd2[0][2] + fd1[i][1] * gd2[1][2];
        const double hxy = fd2[i][0] * gd1[0][0] * gd1[0][1] +
                           fd2[i][1] * (gd1[0][0] * gd1[1][1] + gd1[0][1] * gd1[1][0]) +
                           fd2[i][2] * gd1[1][0] * gd1[1][1] +
                           fd1[i][0] * gd2[0][1] + fd1[i][1] * gd2[1][1];
        CHECK(h.d2[i][0] == doctest::Approx(hxx).epsilon(1e-14));
        CHECK(h.d2[i][1] == doctest::Approx(hxy).epsilon(1e-14));
        CHECK(h.d2[i][2] == doctest::Approx(hyy).epsilon(1e-14));
    }
}

TEST_CASE("counter rng is a pure function of (seed, stream, counter)") {
    CounterRng a(42), b(42), c(43);
    CHECK(a.raw(1, 7) == b.raw(1, 7));
    CHECK(a.raw(1, 7) != c.raw(1, 7));
    CHECK(a.raw(1, 7) != a.raw(2, 7));
    CHECK(a.raw(1, 7) != a.raw(1, 8));
    for (int k = 0; k < 100; ++k) {
        const double u = a.uniform(5, k);
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("safeguarded newton finds bracketed roots") {
    auto f = [](double x) { return std::cos(x) - x; };
    auto df = [](double x) { return -std::sin(x) - 1.0; };
    const double r = newton_bisect(f, df, 0.0, 1.0, 1e-14);
    CHECK(std::fabs(std::cos(r) - r) < 1e-13);

    // nasty derivative: newton would shoot out, bisection safeguard holds
    auto g = [](double x) { return std::tanh(20.0 * (x - 0.3)); };
    auto dg = [](double x) {
        const double t = std::tanh(20.0 * (x - 0.3));
        return 20.0 * (1.0 - t * t);
    };
    const double r2 = newton_bisect(g, dg, -1.0, 1.0, 1e-14);
    CHECK(std::fabs(r2 - 0.3) < 1e-10);
}

TEST_CASE("expression grammar") {
    auto e = Expression::parse("n*(n+1)*x - n");
    CHECK(e.eval(0.5, 0.0, 3.0) == doctest::Approx(3.0).epsilon(1e-15));

    auto t = Expression::parse("sin(3.141592653589793*x)^2 + cos(3.141592653589793*x)^2");
    CHECK(t.eval(0.3, 0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-14));

    CHECK(Expression::parse("2^3^2").eval(0, 0, 0) == doctest::Approx(512.0)); // right-assoc
    CHECK(Expression::parse("-2^2").eval(0, 0, 0) == doctest::Approx(-4.0));   // -(2^2), as in math
    CHECK(Expression::parse("2^-1").eval(0, 0, 0) == doctest::Approx(0.5));
    CHECK(Expression::parse("floor(2.9) + exp(0) / 2").eval(0, 0, 0) == doctest::Approx(2.5));
    CHECK(Expression::parse("log(exp(1))").eval(0, 0, 0) == doctest::Approx(1.0));

    CHECK_THROWS_AS(Expression::parse("x +"), SrbError);
    CHECK_THROWS_AS(Expression::parse("foo(x)"), SrbError);
    CHECK_THROWS_AS(Expression::parse("x ) y"), SrbError);
    CHECK_THROWS_AS(Expression::parse(""), SrbError);
}
