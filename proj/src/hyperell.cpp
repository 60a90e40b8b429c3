#include "minsurf/hyperell.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace minsurf::hyperell {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Segment shortcut for a counterclockwise loop around [a, b] on the upper sheet:
// (e^{2 pi i e_a} - 1) * int_a^b f_+.
cplx ccw_loop_by_segment(const quad::SingularFactorization& f, double a, double b, double tol) {
    const int ia = f.index_of(a);
    const double ea = ia >= 0 ? f.exponents()[ia].to_double() : 0.0;
    const cplx factor = std::polar(1.0, 2.0 * kPi * ea) - 1.0;
    if (std::abs(factor) < 1e-14) return 0;
    return factor * quad::integrate_segment_finite_part(f, a, b, tol);
}

std::vector<double> special_points(const LiftedForm& form) {
    std::vector<double> pts = form.curve().branch_points();
    for (double x : form.factorization().points()) pts.push_back(x);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

// Counterclockwise rectangle around [a, b] starting and ending in the upper
// half-plane above the middle of the interval.
quad::IntegrationPath rectangle_around(const std::vector<double>& pts, double a, double b) {
    double left = -std::numeric_limits<double>::infinity();
    double right = std::numeric_limits<double>::infinity();
    for (double x : pts) {
        if (x < a) left = std::max(left, x);
        if (x > b) right = std::min(right, x);
    }
    const double w = std::max(b - a, 1e-300);
    const double da = std::isfinite(left) ? 0.5 * (a - left) : 0.5 * w;
    const double db = std::isfinite(right) ? 0.5 * (right - b) : 0.5 * w;
    const double h = 0.5 * (w + da + db);
    const double xl = a - da, xr = b + db, mid = 0.5 * (a + b);
    return quad::IntegrationPath{{{mid, h}, {xl, h}, {xl, -h}, {xr, -h}, {xr, h}, {mid, h}}};
}

bool segment_shortcut_valid(const quad::SingularFactorization& f, double a, double b) {
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double x = f.points()[i];
        const Rational e = f.exponents()[i];
        if (x > a && x < b && e != Rational(0)) return false;
        if ((x == a || x == b) && e <= Rational(-1)) {
            if (e.is_integer() || e <= Rational(-2)) return false;
        }
    }
    return true;
}

int decide_b_orientation(const std::vector<double>& t, int genus) {
    if (genus == 0) return 1;
    Eigen::MatrixXcd amat(genus, genus), bmat(genus, genus);
    for (int k = 0; k < genus; ++k) {
        std::vector<double> pts = t;
        std::vector<Rational> ex(t.size(), Rational(-1, 2));
        // z^k: add 0 as a point unless it is already a branch point.
        auto it = std::find(pts.begin(), pts.end(), 0.0);
        if (k > 0) {
            if (it != pts.end()) {
                ex[static_cast<std::size_t>(it - pts.begin())] += Rational(k);
            } else {
                auto pos = std::lower_bound(pts.begin(), pts.end(), 0.0);
                const auto idx = static_cast<std::size_t>(pos - pts.begin());
                pts.insert(pos, 0.0);
                ex.insert(ex.begin() + static_cast<std::ptrdiff_t>(idx), Rational(k));
            }
        }
        const quad::SingularFactorization f(pts, ex, 1.0);
        for (int j = 0; j < genus; ++j) {
            amat(j, k) = ccw_loop_by_segment(f, t[2 * j], t[2 * j + 1], 1e-12);
            bmat(j, k) = -ccw_loop_by_segment(f, t[2 * j + 1], t[2 * j + 2], 1e-12);
        }
    }
    const Eigen::MatrixXcd tau = bmat * amat.inverse();
    Eigen::MatrixXd im = tau.imag();
    im = 0.5 * (im + im.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(im);
    const auto ev = es.eigenvalues();
    if (ev.minCoeff() > 0) return 1;
    if (ev.maxCoeff() < 0) return -1;
    throw std::runtime_error("period matrix has indefinite imaginary part");
}

}  // namespace

HyperellipticCurve::HyperellipticCurve(std::vector<double> branch_points)
    : branch_points_(std::move(branch_points)) {
    if (branch_points_.size() % 2 != 1) {
        throw std::invalid_argument("a hyperelliptic curve needs an odd number of finite branch points");
    }
    for (std::size_t i = 1; i < branch_points_.size(); ++i) {
        if (!(branch_points_[i] > branch_points_[i - 1])) {
            throw std::invalid_argument("branch points must be strictly increasing");
        }
    }
    genus_ = static_cast<int>((branch_points_.size() - 1) / 2);
    b_orientation_ = decide_b_orientation(branch_points_, genus_);
}

bool HyperellipticCurve::is_branch_point(double x) const {
    return std::find(branch_points_.begin(), branch_points_.end(), x) != branch_points_.end();
}

std::string Cycle::label() const {
    std::string s = orientation < 0 ? "-" : "";
    return s + (kind == CycleKind::A ? "A" : "B") + std::to_string(index);
}

std::string Puncture::label() const {
    if (at_infinity) return "inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", z);
    return buf;
}

std::pair<double, double> bracket(const HyperellipticCurve& curve, const Cycle& cycle) {
    if (cycle.index < 0 || cycle.index >= curve.genus()) {
        throw std::invalid_argument("cycle index out of range for the genus");
    }
    const auto& t = curve.branch_points();
    const auto j = static_cast<std::size_t>(cycle.index);
    return cycle.kind == CycleKind::A ? std::make_pair(t[2 * j], t[2 * j + 1])
                                      : std::make_pair(t[2 * j + 1], t[2 * j + 2]);
}

std::vector<Cycle> basis_cycles(const HyperellipticCurve& curve) {
    std::vector<Cycle> out;
    for (int j = 0; j < curve.genus(); ++j) out.push_back({CycleKind::A, j, 1});
    for (int j = 0; j < curve.genus(); ++j) out.push_back({CycleKind::B, j, 1});
    return out;
}

LiftedForm::LiftedForm(HyperellipticCurve curve, quad::SingularFactorization f)
    : curve_(std::move(curve)), f_(std::move(f)) {
    int half = 0, whole = 0;
    for (double t : curve_.branch_points()) {
        const Rational e = exponent_at(t);
        if (e.is_half_odd()) {
            ++half;
        } else if (e.is_integer()) {
            ++whole;
        } else {
            throw std::invalid_argument("branch point exponent must be an integer or half an odd integer");
        }
    }
    if (half > 0 && whole > 0) {
        throw std::invalid_argument("form is not single valued on the double cover");
    }
    odd_ = half > 0;
    for (std::size_t i = 0; i < f_.size(); ++i) {
        if (!curve_.is_branch_point(f_.points()[i]) && !f_.exponents()[i].is_integer()) {
            throw std::invalid_argument("non-branch singular points need integer exponents");
        }
    }
}

Rational LiftedForm::exponent_at(double x) const {
    const int i = f_.index_of(x);
    return i >= 0 ? f_.exponents()[static_cast<std::size_t>(i)] : Rational(0);
}

std::vector<DivisorEntry> LiftedForm::divisor() const {
    std::vector<DivisorEntry> out;
    Rational total = 0;
    for (Rational e : f_.exponents()) total += e;
    std::vector<double> pts = curve_.branch_points();
    for (double x : f_.points()) pts.push_back(x);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    for (double x : pts) {
        const Rational e = exponent_at(x);
        DivisorEntry d;
        d.z = x;
        if (curve_.is_branch_point(x)) {
            d.branch = true;
            d.order = static_cast<int>((Rational(2) * e + 1).num());
        } else {
            if (e == Rational(0)) continue;
            d.lifts = 2;
            d.order = static_cast<int>(e.num());
        }
        out.push_back(d);
    }
    DivisorEntry inf;
    inf.at_infinity = true;
    inf.branch = true;
    inf.order = static_cast<int>((Rational(-2) * total - 3).num());
    out.push_back(inf);
    return out;
}

LiftedForm lift_form(const HyperellipticCurve& curve, const quad::SingularFactorization& f) {
    return LiftedForm(curve, f);
}

cplx period(const LiftedForm& form, const Cycle& cycle, double tol, PeriodMethod method) {
    const auto [a, b] = bracket(form.curve(), cycle);
    // Counterclockwise for A; B as described (clockwise) unless the curve
    // flipped it to keep the intersection pairing positive.
    int sign = cycle.orientation;
    if (cycle.kind == CycleKind::B) sign *= -form.curve().b_orientation();
    const auto& f = form.factorization();
    if (method == PeriodMethod::Automatic) {
        method = segment_shortcut_valid(f, a, b) ? PeriodMethod::Segment : PeriodMethod::Path;
    }
    cplx ccw;
    if (method == PeriodMethod::Segment) {
        ccw = ccw_loop_by_segment(f, a, b, tol);
    } else {
        ccw = quad::integrate_path(f, rectangle_around(special_points(form), a, b), tol);
    }
    return static_cast<double>(sign) * ccw;
}

cplx end_loop_period(const LiftedForm& form, const Puncture& puncture, double tol) {
    const auto pts = special_points(form);
    const auto& f = form.factorization();
    if (puncture.at_infinity) {
        double r = 1.0;
        for (double x : pts) r = std::max(r, std::abs(x));
        const double big = 2.0 * r + 2.0;
        // Clockwise in the z-plane, twice, is the positive loop around infinity.
        quad::IntegrationPath loop{{{0, big}, {big, big}, {big, -big}, {-big, -big}, {-big, big}, {0, big}}};
        std::vector<cplx> twice = loop.waypoints;
        twice.insert(twice.end(), loop.waypoints.begin() + 1, loop.waypoints.end());
        return quad::integrate_path(f, quad::IntegrationPath{twice}, tol);
    }
    const double x = puncture.z;
    double gap = std::numeric_limits<double>::infinity();
    for (double y : pts) {
        if (y != x) gap = std::min(gap, std::abs(y - x));
    }
    const double r = std::isfinite(gap) ? 0.5 * gap : 1.0;
    quad::IntegrationPath loop{{{x, r}, {x - r, r}, {x - r, -r}, {x + r, -r}, {x + r, r}, {x, r}}};
    if (form.curve().is_branch_point(x)) {
        std::vector<cplx> twice = loop.waypoints;
        twice.insert(twice.end(), loop.waypoints.begin() + 1, loop.waypoints.end());
        return quad::integrate_path(f, quad::IntegrationPath{twice}, tol);
    }
    const cplx v = quad::integrate_path(f, loop, tol);
    return (form.odd() && puncture.sheet == 1) ? -v : v;
}

PeriodVector periods(const LiftedForm& form, const std::vector<Puncture>& punctures, double tol,
                     PeriodMethod method) {
    PeriodVector pv;
    for (int j = 0; j < form.curve().genus(); ++j) {
        pv.a_periods.push_back(period(form, Cycle{CycleKind::A, j, 1}, tol, method));
        pv.b_periods.push_back(period(form, Cycle{CycleKind::B, j, 1}, tol, method));
    }
    for (const auto& p : punctures) pv.end_loops.push_back(end_loop_period(form, p, tol));
    return pv;
}

}  // namespace minsurf::hyperell
