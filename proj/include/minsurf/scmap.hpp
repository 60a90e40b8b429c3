#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "minsurf/quad.hpp"
#include "minsurf/rational.hpp"

namespace minsurf::scmap {

using cplx = std::complex<double>;

// F(z) = scale * int_{base}^{z} prod (t - t_i)^{a_i - 1} dt.
struct SCData {
    double scale = 1.0;
    std::vector<double> vertices;
    std::vector<Rational> vertex_data;
    cplx base_point{0.0, 1.0};

    SCData() = default;
    SCData(double scale, std::vector<double> vertices, std::vector<Rational> vertex_data,
           cplx base_point = {0.0, 1.0});

    std::size_t size() const { return vertices.size(); }
    Rational angle_at_infinity() const;
    quad::SingularFactorization integrand() const;
    // Edge k joins vertex k and k+1. It is unbounded when an endpoint has a_i <= 0;
    // its length is then the finite part of the edge integral.
    bool edge_regularized(std::size_t k) const;
};

struct PolygonImage {
    std::vector<std::optional<cplx>> vertex_images;  // nullopt for vertices at infinity
    std::vector<cplx> edge_vectors;                  // n - 1 entries
    std::vector<bool> edge_regularized;
    cplx left_ray;   // unit direction leaving F(t_1) toward t -> -infinity
    cplx right_ray;  // unit direction leaving F(t_n) toward t -> +infinity
    std::vector<double> interior_angles;  // in units of pi, copied from the vertex data
};

cplx evaluate(const SCData& sc, cplx z, double tol = quad::kDefaultTol);

PolygonImage polygon_image(const SCData& sc, double tol = quad::kDefaultTol);

// Real edge integrals times the scale: the length of a bounded edge, the signed
// finite part of an unbounded one. The edge vector is this value times the
// phase of the integrand on the edge.
std::vector<double> signed_edge_lengths(const SCData& sc, double tol = quad::kDefaultTol);

// Vertices 1 and 2 are pinned; the rest are unknowns.
struct Normalization {
    double first = -1.0;
    double second = 0.0;
};

struct ParameterOptions {
    double tol = 1e-11;
    int max_iterations = 200;
    double fd_step = 1e-6;
    double quad_tol = quad::kDefaultTol;
    std::optional<std::vector<double>> initial_vertices;
};

struct ParameterSolution {
    SCData sc;
    double residual = 0;  // max relative length mismatch
    int iterations = 0;
};

// Finds vertices whose edge lengths are proportional to target_lengths. Targets
// of unbounded edges are signed finite parts. The scale is set so the lengths
// match the targets exactly on the reference edge (the longest bounded one).
ParameterSolution solve_parameter_problem(const std::vector<Rational>& vertex_data,
                                          const std::vector<double>& target_lengths,
                                          const Normalization& normalization = {},
                                          const ParameterOptions& options = {});

}  // namespace minsurf::scmap
