#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "minsurf/scmap.hpp"
#include "oracle.hpp"

using namespace minsurf;
using scmap::cplx;
using scmap::SCData;

namespace {

std::vector<Rational> halves(int n) { return std::vector<Rational>(n, half(1)); }

// Alternating convex and concave right angles: a staircase, simple for any
// edge lengths.
std::vector<Rational> right_angle_data(int n, std::mt19937_64& g) {
    const int first = static_cast<int>(g() % 2);
    std::vector<Rational> a;
    for (int i = 0; i < n; ++i) a.push_back((i + first) % 2 == 0 ? half(1) : half(3));
    return a;
}

double max_ratio_error(const std::vector<double>& got, const std::vector<double>& want) {
    double e = 0;
    for (std::size_t i = 0; i < got.size(); ++i) {
        e = std::max(e, std::abs(got[i] / got[0] * want[0] / want[i] - 1.0));
    }
    return e;
}

}  // namespace

TEST_CASE("straight angles give the identity map up to translation") {
    SCData sc(1.0, {-1.0, 0.0, 1.0}, {1, 1, 1});
    CHECK(std::abs(scmap::evaluate(sc, 2.0) - scmap::evaluate(sc, 0.0) - cplx(2.0)) < 1e-12);
    CHECK(std::abs(scmap::evaluate(sc, cplx(0.5, 2.0)) - cplx(0.5, 1.0)) < 1e-12);
    const auto img = scmap::polygon_image(sc);
    for (const auto& e : img.edge_vectors) CHECK(std::abs(e.imag()) < 1e-14);
}

TEST_CASE("genus-1 vertex data gives alternating edges and the angle at infinity") {
    SCData sc(1.0, {-1.0, 0.0, 1.0, 2.0}, {1, half(1), half(3), half(1)});
    CHECK(sc.angle_at_infinity() == Rational(-3, 2));
    const auto img = scmap::polygon_image(sc);
    REQUIRE(img.edge_vectors.size() == 3);
    // Consecutive finite edges meet at right angles.
    for (int k = 0; k + 1 < 3; ++k) {
        const cplx u = img.edge_vectors[k] / std::abs(img.edge_vectors[k]);
        const cplx v = img.edge_vectors[k + 1] / std::abs(img.edge_vectors[k + 1]);
        CHECK(std::abs((std::conj(u) * v).real()) < 1e-12);
    }
    // Edge directions from the quadrature oracle.
    const std::vector<oracle::Power> f = {{0.0, -1, 2}, {1.0, 1, 2}, {2.0, -1, 2}};
    for (int k = 1; k < 3; ++k) {
        const cplx ref = oracle::segment(f, sc.vertices[k], sc.vertices[k + 1]);
        CHECK(std::abs(img.edge_vectors[k] - ref) < 1e-10 * std::abs(ref));
    }
    // With the upper half-plane branch, p0 p1 is horizontal and p1 pt vertical.
    CHECK(std::abs(img.edge_vectors[1].imag()) < 1e-12);
    CHECK(std::abs(img.edge_vectors[2].real()) < 1e-12);
    CHECK(img.interior_angles[2] == doctest::Approx(1.5));
}

TEST_CASE("square from the elliptic modulus") {
    // T = (-t, -1, 1, t): [-1, 1] maps to 2K(1/t), [1, t] to K(k').
    auto gap = [](double t) {
        const double k = 1.0 / t;
        return 2.0 * oracle::ellip_k(k) - oracle::ellip_k(std::sqrt(1 - k * k));
    };
    double lo = 1.0001, hi = 100.0;
    for (int i = 0; i < 200; ++i) {
        const double m = 0.5 * (lo + hi);
        (gap(m) > 0 ? lo : hi) = m;
    }
    const double t = 0.5 * (lo + hi);
    SCData sc(1.0, {-t, -1.0, 1.0, t}, halves(4));
    const auto len = scmap::signed_edge_lengths(sc);
    CHECK(len[1] / len[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(len[2] / len[1] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("rectangle modulus matches the elliptic integral oracle") {
    for (double r : {0.5, 1.0, 2.0}) {
        const auto sol = scmap::solve_parameter_problem(halves(4), {1.0, r, 1.0});
        const auto& t = sol.sc.vertices;
        CAPTURE(r);
        CHECK(oracle::rectangle_ratio(t[0], t[1], t[2], t[3]) == doctest::Approx(r).epsilon(1e-8));
        CHECK(sol.residual < 1e-8);
    }
}

TEST_CASE("rigid triangle needs no iterations") {
    // Right isosceles triangle, no vertex at infinity.
    const std::vector<Rational> a = {half(1), Rational(1, 4), Rational(1, 4)};
    const auto sol = scmap::solve_parameter_problem(a, {1.0, std::sqrt(2.0)});
    CHECK(sol.iterations == 0);
    CHECK(sol.sc.vertices == std::vector<double>{-1.0, 0.0, 1.0});
    const auto len = scmap::signed_edge_lengths(sol.sc);
    CHECK(len[1] / len[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("degenerate targets are rejected") {
    CHECK_THROWS_AS(scmap::solve_parameter_problem(halves(4), {1.0, 1e-9, 1.0}), DegenerateTarget);
}

TEST_CASE("genus-2 polygon lengths are reproduced") {
    const std::vector<Rational> a = {1, half(1), half(3), half(1), half(3), half(1)};
    const std::vector<double> lengths = {1.3, 0.8, 1.1, 0.6, 0.9};
    const auto sol = scmap::solve_parameter_problem(a, lengths);
    const auto img = scmap::polygon_image(sol.sc);
    std::vector<double> got;
    for (const auto& e : img.edge_vectors) got.push_back(std::abs(e));
    CHECK(max_ratio_error(got, lengths) < 1e-8);
}

TEST_CASE("random right-angle polygons round trip") {
    auto& g = fixtures::rng();
    std::uniform_int_distribution<int> size(4, 8);
    std::uniform_real_distribution<double> len(0.5, 2.0);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = size(g);
        const auto a = right_angle_data(n, g);
        std::vector<double> lengths(n - 1);
        for (auto& l : lengths) l = len(g);
        const auto sol = scmap::solve_parameter_problem(a, lengths);
        const auto img = scmap::polygon_image(sol.sc);
        std::vector<double> got;
        for (const auto& e : img.edge_vectors) got.push_back(std::abs(e));
        CAPTURE(trial);
        CAPTURE(n);
        CHECK(max_ratio_error(got, lengths) < 1e-8);
        for (std::size_t k = 0; k + 1 < img.edge_vectors.size(); ++k) {
            const cplx u = img.edge_vectors[k] / std::abs(img.edge_vectors[k]);
            const cplx v = img.edge_vectors[k + 1] / std::abs(img.edge_vectors[k + 1]);
            CHECK(std::abs((std::conj(u) * v).real()) < 1e-8);
        }
        Rational total = sol.sc.angle_at_infinity();
        for (auto x : a) total += x;
        CHECK(total == Rational(2));
    }
}

TEST_CASE("edge ratios are invariant under translation and scaling of the vertices") {
    const std::vector<double> t = {-1.0, 0.0, 0.7, 2.1, 3.0};
    const std::vector<Rational> a = {half(1), half(3), half(1), half(1), half(1)};
    const auto base = scmap::signed_edge_lengths(SCData(1.0, t, a));
    for (auto [s, r] : {std::pair{0.3, 2.0}, std::pair{-5.0, 0.25}}) {
        std::vector<double> moved;
        for (double x : t) moved.push_back(r * x + s);
        const auto len = scmap::signed_edge_lengths(SCData(1.0, moved, a));
        for (std::size_t k = 1; k < len.size(); ++k) {
            CHECK(len[k] / len[0] == doctest::Approx(base[k] / base[0]).epsilon(1e-12));
        }
    }
}

TEST_CASE("non-integrable vertex") {
    SCData sc(1.0, {-1.0, 0.0, 1.0}, {1, 0, 1});
    CHECK_THROWS_AS(scmap::evaluate(sc, 0.0), NonIntegrableVertex);
}
