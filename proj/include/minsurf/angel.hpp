#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "minsurf/orthodisk.hpp"
#include "minsurf/scmap.hpp"

namespace minsurf::angel {

using cplx = std::complex<double>;

// Vertex data of the two orthodisks for genus p on T = (t_{-1}, t_0, ..., t_{2p}).
struct AngelVertexData {
    int genus = 1;
    std::vector<Rational> a_geta;     // (1, 1/2, 3/2, 1/2, ..., 3/2, 1/2)
    std::vector<Rational> a_ginveta;  // (3, -1/2, 1/2, 3/2, ..., 1/2, 3/2)
    std::size_t marked_count = 3;

    std::vector<std::size_t> marked() const;  // indices 1 .. 2p+1
};

AngelVertexData angel_data(int p);

// Edge lengths shared by the pair. Q1 has bounded edges
//   (l_minus1, l0, stairs..., l_last)
// and Q2 has the same edges except the first, which is unbounded; mu is its
// signed finite part.
struct PairBase {
    double l_minus1 = 0;
    double l0 = 0;
    double l_last = 0;
    double mu = 0;
};

struct PolygonPair {
    int genus = 1;
    PairBase base;
    std::vector<double> stairs;  // 2p - 2 staircase edges
    // Drawn edges: Q1 in the orientation of its SC image, Q2 turned by -pi/2 so
    // the staircases are mirror images across the line y = -x.
    std::vector<cplx> q1_edges;
    std::vector<cplx> q2_edges;
    std::vector<cplx> q1_vertices;  // cumulative, starting at 0

    std::vector<double> q1_targets() const;
    std::vector<double> q2_targets() const;
};

// Staircase with mirror symmetry built from its first half (l_1, ..., l_{p-1}).
std::vector<double> symmetric_staircase(const std::vector<double>& half);

PolygonPair build_polygon_pair(const PairBase& base, const std::vector<double>& stairs);

struct TracePoint {
    int iteration;
    double residual;
    double step;
};

struct SolveResult {
    int genus = 1;
    std::vector<double> t_vector;  // Q1 vertices, t_{-1} = -1, t_0 = 0
    std::vector<double> s_vector;  // Q2 vertices in the same normalization
    double c1 = 0, c2 = 0;
    double residual_reflexive = 0;
    double residual_conjugate = 0;
    int iterations = 0;
    PolygonPair pair;
    std::vector<TracePoint> trace;

    // Gauss map constant of the assembled data, sqrt(c1 / c2).
    double gauss_constant() const;
};

orthodisk::EnhancedOrthodisk geta_orthodisk(int p, double c, const std::vector<double>& t);
orthodisk::EnhancedOrthodisk ginveta_orthodisk(int p, double c, const std::vector<double>& t);

struct SolveOptions {
    double quad_tol = 1e-13;
    double inner_tol = 1e-12;
    int max_iterations = 60;
    std::function<void(const TracePoint&)> on_iteration;
};

// Genus-1 period problem on w^2 = z (z - 1)(z - t): unknowns (log c, log(t - 1)).
SolveResult solve_genus1(double tol = 1e-12, const SolveOptions& options = {});

struct MismatchEvaluation {
    std::vector<double> mismatch;  // normalized t - s at the 2p interior vertices
    scmap::SCData q1;
    scmap::SCData q2;
};

// Solves both parameter problems of the pair and compares the normalized
// vertex vectors. Warm starts are optional.
MismatchEvaluation reflexive_mismatch(const PolygonPair& pair,
                                      const std::optional<std::vector<double>>& q1_guess = std::nullopt,
                                      const std::optional<std::vector<double>>& q2_guess = std::nullopt,
                                      const SolveOptions& options = {});

// Vertex vector for genus p obtained by appending one staircase block beyond
// the last vertex of a genus p - 1 solution.
std::vector<double> continuation_guess(const std::vector<double>& previous);

// Finds a reflexive pair of genus p by continuation from a genus p - 1 result
// (solved internally when absent). Throws NoConvergence.
SolveResult solve_genus_p(int p, const std::optional<SolveResult>& seed, double tol = 1e-10,
                          const SolveOptions& options = {});

// Sum over pairs of (e^{E1} - e^{E2})^2 + (e^{1/E1} - e^{1/E2})^2.
double height_value(const std::vector<std::pair<double, double>>& ext_pairs);

}  // namespace minsurf::angel
