#pragma once

#include <string>
#include <vector>

#include "minsurf/hyperell.hpp"
#include "minsurf/scmap.hpp"

namespace minsurf::orthodisk {

// SC data together with an odd-sized set of marked vertices, the branch set of
// the double cover on which F*(dz) becomes single valued.
class EnhancedOrthodisk {
public:
    EnhancedOrthodisk(scmap::SCData sc, std::vector<std::size_t> marked);

    const scmap::SCData& sc() const { return sc_; }
    const std::vector<std::size_t>& marked() const { return marked_; }
    int genus() const { return static_cast<int>((marked_.size() - 1) / 2); }
    bool is_marked(std::size_t i) const;

    hyperell::HyperellipticCurve curve() const;
    hyperell::LiftedForm lifted_form() const;

private:
    scmap::SCData sc_;
    std::vector<std::size_t> marked_;
};

struct DivisorRow {
    bool at_infinity = false;
    std::size_t vertex = 0;  // index into T when finite
    int lifts = 1;
    int order = 0;
    double cone_angle = 0;  // in units of pi
};

struct DivisorTable {
    std::vector<DivisorRow> entries;
    int degree() const;
};

DivisorTable divisor(const EnhancedOrthodisk& x);

// zeta = sqrt(c1 c2) prod (t - t_j)^{(a_j + b_j)/2 - 1} dt.
quad::SingularFactorization build_eta(const EnhancedOrthodisk& x, const EnhancedOrthodisk& y);

struct ConjugacyReport {
    std::vector<std::string> labels;
    std::vector<double> residuals;
    double max_residual = 0;

    void add(std::string label, double r);
};

// |int omega_X - conj int omega_Y| over A_j, B_j and the loops around the first
// marked vertex and infinity.
ConjugacyReport conjugacy_report(const EnhancedOrthodisk& x, const EnhancedOrthodisk& y,
                                 double tol = quad::kDefaultTol);

// Vertex vector mapped by z -> (z - t_first) / (t_last - t_first).
std::vector<double> normalized_vertices(const std::vector<double>& t);

double reflexivity_residual(const EnhancedOrthodisk& x, const EnhancedOrthodisk& y);

}  // namespace minsurf::orthodisk
