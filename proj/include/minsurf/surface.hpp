#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "minsurf/angel.hpp"
#include "minsurf/hyperell.hpp"
#include "minsurf/orthodisk.hpp"

namespace minsurf::surface {

using cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;

// constant * prod (z - x_i)^{e_i}. On a curve the exponents at branch points
// are either all half-odd (the function changes sign between sheets) or all
// integers; everywhere else they are integers.
struct CurveFunction {
    double constant = 1.0;
    std::vector<double> points;
    std::vector<Rational> exponents;

    Rational exponent_at(double x) const;
    CurveFunction inverse() const;
    CurveFunction times(const CurveFunction& other) const;
    quad::SingularFactorization factorization() const;
};

// Gauss map G and height differential eta = density(z) dz on the double cover
// of the given curve, or on the plane when no curve is set.
struct WeierstrassData {
    std::optional<hyperell::HyperellipticCurve> curve;
    CurveFunction gauss;
    CurveFunction eta;
    std::vector<hyperell::Puncture> punctures;

    int genus() const { return curve ? curve->genus() : 0; }
    bool is_branch_point(double x) const { return curve && curve->is_branch_point(x); }
    // Odd functions change sign between sheets.
    bool odd(const CurveFunction& f) const;
};

// Value of f at z on the given sheet. The upper sheet continues the principal
// branch of the upper half-plane across the non-cut intervals; on the real
// axis the limit from above is returned.
cplx evaluate(const WeierstrassData& wd, const CurveFunction& f, cplx z, int sheet = 0);

// Unit normal (2 Re G, 2 Im G, |G|^2 - 1) / (|G|^2 + 1); poles of G give (0, 0, 1).
Vec3 normal_at(const WeierstrassData& wd, cplx z, int sheet = 0);

// Builds G = c w / (F2(z) (z + 1)) and eta = (z + 1)/z dz from a solved pair,
// after moving the common vertex set so that t_{-1} = -1 and t_0 = 0.
// F2 is the product of (z - t_{2j}). Throws DivisorMismatch.
WeierstrassData assemble(const angel::SolveResult& result);

// Divisor of a function or form at a point of the cover (order per lift) and
// at infinity.
int function_order(const WeierstrassData& wd, const CurveFunction& f, const hyperell::Puncture& at);
int form_order(const WeierstrassData& wd, const CurveFunction& density, const hyperell::Puncture& at);

// Number of poles of G on the compact surface, with multiplicity.
int gauss_degree(const WeierstrassData& wd);

// (eta)_0 = (G)_0 + (G)_inf away from the punctures, and eta has no poles there.
void check_divisor_condition(const WeierstrassData& wd);

// Direct re-integration of G eta, G^{-1} eta and eta on the curve: labels
// "<cycle>:conj" for |int G eta - conj int G^{-1} eta| and "<cycle>:re_eta"
// for |Re int eta|, over all A_j, B_j and every puncture loop.
orthodisk::ConjugacyReport verify_periods(const WeierstrassData& wd, double tol = 1e-12);

enum class EndType { Catenoid, Enneper, Other };
std::string to_string(EndType t);
EndType classify(int ord_g, int ord_eta);

struct EndInfo {
    hyperell::Puncture puncture;
    int ord_g = 0;
    int ord_eta = 0;
    EndType type = EndType::Other;
    // d log sqrt(lambda) / d log r probed next to the end; the metric is
    // complete there when it is <= -1 at a finite end, >= -1 at infinity.
    double growth = 0;
    bool complete = false;
};

struct EndReport {
    std::vector<EndInfo> ends;
};

EndReport classify_ends(const WeierstrassData& wd);

struct MeshOptions {
    int angular = 96;
    std::optional<double> r_min;
    std::optional<double> r_max;
    double quad_tol = 1e-12;
    double path_tol = 1e-6;  // PeriodLeak is raised above 10 * path_tol
};

// r_min = 1e-3 * (smallest gap between 0 and the branch points),
// r_max = 50 * (largest branch point). Plane data uses [1e-2, 10].
std::pair<double, double> default_truncation(const WeierstrassData& wd);

struct SurfaceMesh {
    std::vector<Vec3> positions;
    std::vector<Vec3> normals;
    std::vector<std::array<int, 3>> triangles;
    std::vector<std::vector<int>> boundary_loops;

    // Parameter of each vertex and the polar grid it came from.
    std::vector<cplx> z;
    std::vector<int> sheet;
    std::vector<int> ring;
    std::vector<int> column;
    std::vector<double> radii;
    int angular = 0;
    int sheets = 1;
    std::vector<int> grid;  // vertex id of (sheet, ring, column)
    int root = 0;           // base point of the integration, placed at the origin

    // Largest disagreement between the spanning-tree position and direct
    // integration along a non-tree edge.
    double period_leak = 0;

    int vertex_at(int s, int i, int j) const;
};

// Re int (1/2 (1/G - G), i/2 (1/G + G), 1) eta over a polar grid around z = 0
// on every sheet, stitched across the cuts. Throws PeriodLeak.
SurfaceMesh immerse(const WeierstrassData& wd, const MeshOptions& options = {});

struct Diagnostics {
    int gauss_degree = 0;
    double total_curvature = 0;
    double expected_curvature = 0;  // -4 pi deg G
    double curvature_relative_error = 0;
    std::vector<double> conformal_factor;  // 1/4 (|G| + 1/|G|)^2 |eta/dz|^2
    double anisotropy_max = 0;
    double anisotropy_median = 0;
    int euler_characteristic = 0;
    std::size_t boundary_loops = 0;
    std::size_t triangles = 0;
    double period_leak = 0;
};

Diagnostics diagnostics(const WeierstrassData& wd, const SurfaceMesh& mesh);

void write_obj(const SurfaceMesh& mesh, const std::string& path);
void write_ply(const SurfaceMesh& mesh, const std::string& path);

}  // namespace minsurf::surface
