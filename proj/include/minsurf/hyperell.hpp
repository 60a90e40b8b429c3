#pragma once

#include <complex>
#include <string>
#include <vector>

#include "minsurf/quad.hpp"

namespace minsurf::hyperell {

using cplx = std::complex<double>;

// w^2 = prod (z - t_i) over an odd number 2p + 1 of real branch points; infinity
// is the remaining branch point. Cuts are [t_{2j}, t_{2j+1}] and [t_{2p}, inf).
// On the upper sheet w is the principal branch in the upper half-plane, so
// w > 0 on the real axis right of the last branch point.
class HyperellipticCurve {
public:
    explicit HyperellipticCurve(std::vector<double> branch_points);

    const std::vector<double>& branch_points() const { return branch_points_; }
    int genus() const { return genus_; }
    bool is_branch_point(double x) const;

    // +1 when the clockwise B_j cycles already pair with the A_j as
    // A_j . B_j = +1; -1 when they had to be reversed. Decided from the sign of
    // Im(tau) for the holomorphic forms z^k dz / w.
    int b_orientation() const { return b_orientation_; }

private:
    std::vector<double> branch_points_;
    int genus_;
    int b_orientation_ = 1;
};

enum class CycleKind { A, B };

struct Cycle {
    CycleKind kind = CycleKind::A;
    int index = 0;
    int orientation = 1;  // -1 for the reversed cycle

    Cycle reversed() const { return Cycle{kind, index, -orientation}; }
    std::string label() const;
};

// Interval of branch points encircled by the cycle: A_j -> [t_{2j}, t_{2j+1}],
// B_j -> [t_{2j+1}, t_{2j+2}].
std::pair<double, double> bracket(const HyperellipticCurve& curve, const Cycle& cycle);

std::vector<Cycle> basis_cycles(const HyperellipticCurve& curve);

struct Puncture {
    bool at_infinity = false;
    double z = 0.0;
    int sheet = 0;  // only used for non-branch finite punctures

    static Puncture infinity() { return Puncture{true, 0.0, 0}; }
    static Puncture at(double x, int sheet = 0) { return Puncture{false, x, sheet}; }
    std::string label() const;
};

struct DivisorEntry {
    bool at_infinity = false;
    double z = 0.0;
    bool branch = false;
    int lifts = 1;  // 2 for a non-branch point (both preimages carry the order)
    int order = 0;
};

// A meromorphic form f(z) dz on the double cover. Either every branch point has a
// half-odd exponent (odd form, changes sign between sheets) or every branch
// point has an integer exponent (pull-back of a form on the sphere).
class LiftedForm {
public:
    LiftedForm(HyperellipticCurve curve, quad::SingularFactorization f);

    const HyperellipticCurve& curve() const { return curve_; }
    const quad::SingularFactorization& factorization() const { return f_; }
    bool odd() const { return odd_; }
    Rational exponent_at(double x) const;

    std::vector<DivisorEntry> divisor() const;

private:
    HyperellipticCurve curve_;
    quad::SingularFactorization f_;
    bool odd_ = false;
};

LiftedForm lift_form(const HyperellipticCurve& curve, const quad::SingularFactorization& f);

enum class PeriodMethod { Automatic, Segment, Path };

cplx period(const LiftedForm& form, const Cycle& cycle, double tol = quad::kDefaultTol,
            PeriodMethod method = PeriodMethod::Automatic);

// Positively oriented loop around the puncture on the cover: twice around a
// branch point in the z-plane, once around a regular point on the given sheet.
cplx end_loop_period(const LiftedForm& form, const Puncture& puncture,
                     double tol = quad::kDefaultTol);

struct PeriodVector {
    std::vector<cplx> a_periods;
    std::vector<cplx> b_periods;
    std::vector<cplx> end_loops;
};

PeriodVector periods(const LiftedForm& form, const std::vector<Puncture>& punctures,
                     double tol = quad::kDefaultTol, PeriodMethod method = PeriodMethod::Automatic);

}  // namespace minsurf::hyperell
