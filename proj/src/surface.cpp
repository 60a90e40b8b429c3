#include "minsurf/surface.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <limits>
#include <map>

namespace minsurf::surface {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

int to_int(Rational r, const char* what) {
    if (!r.is_integer()) throw DivisorMismatch(std::string("non-integer order ") + what);
    return static_cast<int>(r.num());
}

cplx upper_difference(cplx z, double x) {
    cplx d = z - x;
    if (d.imag() == 0.0) d = cplx(d.real(), 0.0);
    return d;
}

std::vector<double> union_points(const WeierstrassData& wd) {
    std::vector<double> pts = wd.gauss.points;
    pts.insert(pts.end(), wd.eta.points.begin(), wd.eta.points.end());
    if (wd.curve) pts.insert(pts.end(), wd.curve->branch_points().begin(), wd.curve->branch_points().end());
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

bool is_puncture(const WeierstrassData& wd, const hyperell::Puncture& p) {
    for (const auto& q : wd.punctures) {
        if (q.at_infinity && p.at_infinity) return true;
        if (!q.at_infinity && !p.at_infinity && q.z == p.z) return true;
    }
    return false;
}

// The three components of (1/2 (1/G - G), i/2 (1/G + G), 1) eta, sharing one
// logarithm per singular point.
class PhiEvaluator {
public:
    explicit PhiEvaluator(const WeierstrassData& wd) {
        const CurveFunction geta = wd.gauss.times(wd.eta);
        const CurveFunction ginveta = wd.gauss.inverse().times(wd.eta);
        points_ = union_points(wd);
        for (double x : points_) {
            e_[0].push_back(geta.exponent_at(x).to_double());
            e_[1].push_back(ginveta.exponent_at(x).to_double());
            e_[2].push_back(wd.eta.exponent_at(x).to_double());
        }
        c_ = {geta.constant, ginveta.constant, wd.eta.constant};
        odd_ = {wd.odd(geta), wd.odd(ginveta), wd.odd(wd.eta)};
    }

    bool singular_at(cplx z) const {
        if (z.imag() != 0.0) return false;
        return std::find(points_.begin(), points_.end(), z.real()) != points_.end();
    }

    std::array<cplx, 3> operator()(cplx z, int sheet) const {
        std::array<cplx, 3> s{0.0, 0.0, 0.0};
        for (std::size_t i = 0; i < points_.size(); ++i) {
            const cplx l = std::log(upper_difference(z, points_[i]));
            for (int k = 0; k < 3; ++k) s[k] += e_[k][i] * l;
        }
        std::array<cplx, 3> v;
        for (int k = 0; k < 3; ++k) {
            v[k] = c_[k] * std::exp(s[k]);
            if (odd_[k] && ((sheet == 1) != (z.imag() < 0))) v[k] = -v[k];
        }
        const cplx g = v[0], gi = v[1];
        return {0.5 * (gi - g), cplx(0, 0.5) * (gi + g), v[2]};
    }

private:
    std::vector<double> points_;
    std::array<std::vector<double>, 3> e_;
    std::array<double, 3> c_{};
    std::array<bool, 3> odd_{};
};

Vec3 edge_integral(const PhiEvaluator& phi, cplx za, cplx zb, int sheet, double tol) {
    const bool sa = phi.singular_at(za), sb = phi.singular_at(zb);
    if (sa && sb) {
        const cplx m = 0.5 * (za + zb);
        const Vec3 x = edge_integral(phi, za, m, sheet, tol);
        const Vec3 y = edge_integral(phi, m, zb, sheet, tol);
        return {x[0] + y[0], x[1] + y[1], x[2] + y[2]};
    }
    if (sb) {
        const Vec3 r = edge_integral(phi, zb, za, sheet, tol);
        return {-r[0], -r[1], -r[2]};
    }
    const cplx d = zb - za;
    std::array<cplx, 3> v;
    if (sa) {
        // z = za + s^2 d removes the square-root behaviour at a branch point.
        v = quad::integrate_weighted<std::array<cplx, 3>>(
            [&](double s) {
                auto f = phi(za + (s * s) * d, sheet);
                for (auto& x : f) x *= 2.0 * s * d;
                return f;
            },
            0.0, 1.0, 0.0, 0.0, tol);
    } else {
        v = quad::integrate_weighted<std::array<cplx, 3>>(
            [&](double u) {
                auto f = phi(za + u * d, sheet);
                for (auto& x : f) x *= d;
                return f;
            },
            0.0, 1.0, 0.0, 0.0, tol);
    }
    return {v[0].real(), v[1].real(), v[2].real()};
}

double conformal_factor_at(const WeierstrassData& wd, cplx z, int sheet) {
    const double g = std::abs(evaluate(wd, wd.gauss, z, sheet));
    const double e = std::abs(evaluate(wd, wd.eta, z, sheet));
    const double s = g + 1.0 / g;
    return 0.25 * s * s * e * e;
}

Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

// Signed solid angle of the spherical triangle with unit vertices a, b, c.
double solid_angle(const Vec3& a, const Vec3& b, const Vec3& c) {
    const double num = dot(a, cross(b, c));
    const double den = 1.0 + dot(a, b) + dot(b, c) + dot(c, a);
    return 2.0 * std::atan2(num, den);
}

}  // namespace

Rational CurveFunction::exponent_at(double x) const {
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i] == x) return exponents[i];
    }
    return Rational(0);
}

CurveFunction CurveFunction::inverse() const {
    CurveFunction r = *this;
    r.constant = 1.0 / constant;
    for (auto& e : r.exponents) e = -e;
    return r;
}

CurveFunction CurveFunction::times(const CurveFunction& other) const {
    std::map<double, Rational> acc;
    for (std::size_t i = 0; i < points.size(); ++i) acc[points[i]] += exponents[i];
    for (std::size_t i = 0; i < other.points.size(); ++i) acc[other.points[i]] += other.exponents[i];
    CurveFunction r;
    r.constant = constant * other.constant;
    for (const auto& [x, e] : acc) {
        r.points.push_back(x);
        r.exponents.push_back(e);
    }
    return r;
}

quad::SingularFactorization CurveFunction::factorization() const {
    std::map<double, Rational> acc;
    for (std::size_t i = 0; i < points.size(); ++i) acc[points[i]] += exponents[i];
    std::vector<double> pts;
    std::vector<Rational> ex;
    for (const auto& [x, e] : acc) {
        if (e == Rational(0)) continue;
        pts.push_back(x);
        ex.push_back(e);
    }
    return quad::SingularFactorization(pts, ex, constant);
}

bool WeierstrassData::odd(const CurveFunction& f) const {
    if (!curve) return false;
    return f.exponent_at(curve->branch_points().front()).is_half_odd();
}

cplx evaluate(const WeierstrassData& wd, const CurveFunction& f, cplx z, int sheet) {
    cplx s = 0;
    int zero_order = 0;
    for (std::size_t i = 0; i < f.points.size(); ++i) {
        const cplx d = upper_difference(z, f.points[i]);
        const double e = f.exponents[i].to_double();
        if (e == 0.0) continue;
        if (d == 0.0) {
            zero_order = e > 0 ? 1 : -1;
            continue;
        }
        s += e * std::log(d);
    }
    if (zero_order > 0) return 0.0;
    if (zero_order < 0) return cplx(kInf, 0.0);
    cplx v = f.constant * std::exp(s);
    if (wd.odd(f) && ((sheet == 1) != (z.imag() < 0))) v = -v;
    return v;
}

Vec3 normal_at(const WeierstrassData& wd, cplx z, int sheet) {
    const cplx g = evaluate(wd, wd.gauss, z, sheet);
    if (std::isfinite(g.real()) && std::isfinite(g.imag()) && std::abs(g) <= 1.0) {
        const double n = std::norm(g);
        return {2 * g.real() / (n + 1), 2 * g.imag() / (n + 1), (n - 1) / (n + 1)};
    }
    const cplx h = evaluate(wd, wd.gauss.inverse(), z, sheet);
    const double n = std::norm(h);
    return {2 * h.real() / (1 + n), -2 * h.imag() / (1 + n), (1 - n) / (1 + n)};
}

WeierstrassData assemble(const angel::SolveResult& result) {
    const int p = result.genus;
    const auto& t = result.t_vector;
    if (p < 1 || t.size() != static_cast<std::size_t>(2 * p + 2)) {
        throw std::invalid_argument("solution vertex vector does not match its genus");
    }
    if (!(result.c1 > 0) || !(result.c2 > 0)) throw std::invalid_argument("SC scales must be positive");
    const double lambda = t[1] - t[0];
    std::vector<double> tn(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) tn[i] = (t[i] - t[1]) / lambda;
    tn[0] = -1.0;
    tn[1] = 0.0;

    // z = lambda z' + t_0 multiplies c prod (z - t_i)^{e_i} dz by lambda^{sum e + 1}.
    const auto data = angel::angel_data(p);
    auto shift = [&](const std::vector<Rational>& a) {
        double s = 1.0;
        for (Rational x : a) s += (x - 1).to_double();
        return std::pow(lambda, s);
    };
    const double c1 = result.c1 * shift(data.a_geta);
    const double c2 = result.c2 * shift(data.a_ginveta);

    WeierstrassData wd;
    wd.curve = hyperell::HyperellipticCurve(std::vector<double>(tn.begin() + 1, tn.end()));
    wd.gauss.constant = std::sqrt(c1 / c2);
    wd.gauss.points = tn;
    wd.gauss.exponents = {Rational(-1), half(1)};
    for (int k = 1; k <= 2 * p; ++k) wd.gauss.exponents.push_back(k % 2 == 1 ? half(1) : half(-1));
    wd.eta.constant = 1.0;
    wd.eta.points = {-1.0, 0.0};
    wd.eta.exponents = {Rational(1), Rational(-1)};
    wd.punctures = {hyperell::Puncture::at(0.0), hyperell::Puncture::infinity()};
    check_divisor_condition(wd);
    return wd;
}

int function_order(const WeierstrassData& wd, const CurveFunction& f, const hyperell::Puncture& at) {
    if (at.at_infinity) {
        Rational s = 0;
        for (Rational e : f.exponents) s += e;
        return to_int(wd.curve ? Rational(-2) * s : -s, "at infinity");
    }
    const Rational e = f.exponent_at(at.z);
    return to_int(wd.is_branch_point(at.z) ? Rational(2) * e : e, "at a finite point");
}

int form_order(const WeierstrassData& wd, const CurveFunction& density, const hyperell::Puncture& at) {
    if (at.at_infinity) {
        Rational s = 0;
        for (Rational e : density.exponents) s += e;
        return to_int(wd.curve ? Rational(-2) * s - 3 : -s - 2, "at infinity");
    }
    const Rational e = density.exponent_at(at.z);
    return to_int(wd.is_branch_point(at.z) ? Rational(2) * e + 1 : e, "at a finite point");
}

int gauss_degree(const WeierstrassData& wd) {
    int deg = 0;
    for (double x : union_points(wd)) {
        const int o = function_order(wd, wd.gauss, hyperell::Puncture::at(x));
        if (o < 0) deg += -o * (wd.is_branch_point(x) ? 1 : (wd.curve ? 2 : 1));
    }
    deg += std::max(0, -function_order(wd, wd.gauss, hyperell::Puncture::infinity()));
    return deg;
}

void check_divisor_condition(const WeierstrassData& wd) {
    std::vector<hyperell::Puncture> pts;
    for (double x : union_points(wd)) pts.push_back(hyperell::Puncture::at(x));
    pts.push_back(hyperell::Puncture::infinity());
    for (const auto& p : pts) {
        if (is_puncture(wd, p)) continue;
        const int og = function_order(wd, wd.gauss, p);
        const int oe = form_order(wd, wd.eta, p);
        if (oe != std::abs(og)) {
            throw DivisorMismatch("divisor condition fails at " + p.label() + ": ord G = " + std::to_string(og) +
                                  ", ord eta = " + std::to_string(oe));
        }
    }
}

orthodisk::ConjugacyReport verify_periods(const WeierstrassData& wd, double tol) {
    const CurveFunction geta = wd.gauss.times(wd.eta);
    const CurveFunction ginveta = wd.gauss.inverse().times(wd.eta);
    orthodisk::ConjugacyReport rep;
    auto record = [&](const std::string& label, cplx pg, cplx pi, cplx pe) {
        rep.add(label + ":conj", std::abs(pg - std::conj(pi)));
        rep.add(label + ":re_eta", std::abs(pe.real()));
    };
    if (wd.curve) {
        const hyperell::LiftedForm fg(*wd.curve, geta.factorization());
        const hyperell::LiftedForm fi(*wd.curve, ginveta.factorization());
        const hyperell::LiftedForm fe(*wd.curve, wd.eta.factorization());
        const auto m = hyperell::PeriodMethod::Path;
        for (const auto& cyc : hyperell::basis_cycles(*wd.curve)) {
            record(cyc.label(), hyperell::period(fg, cyc, tol, m), hyperell::period(fi, cyc, tol, m),
                   hyperell::period(fe, cyc, tol, m));
        }
        for (const auto& p : wd.punctures) {
            record("end:" + p.label(), hyperell::end_loop_period(fg, p, tol), hyperell::end_loop_period(fi, p, tol),
                   hyperell::end_loop_period(fe, p, tol));
        }
        return rep;
    }
    // Plane data: one loop around each puncture.
    const auto pts = union_points(wd);
    for (const auto& p : wd.punctures) {
        quad::IntegrationPath loop;
        if (p.at_infinity) {
            double r = 1.0;
            for (double x : pts) r = std::max(r, std::abs(x));
            const double b = 2.0 * r + 2.0;
            loop.waypoints = {{0, b}, {b, b}, {b, -b}, {-b, -b}, {-b, b}, {0, b}};
        } else {
            double gap = kInf;
            for (double y : pts) {
                if (y != p.z) gap = std::min(gap, std::abs(y - p.z));
            }
            const double r = std::isfinite(gap) ? 0.5 * gap : 1.0;
            const double x = p.z;
            loop.waypoints = {{x, r}, {x - r, r}, {x - r, -r}, {x + r, -r}, {x + r, r}, {x, r}};
        }
        record("end:" + p.label(), quad::integrate_path(geta.factorization(), loop, tol),
               quad::integrate_path(ginveta.factorization(), loop, tol),
               quad::integrate_path(wd.eta.factorization(), loop, tol));
    }
    return rep;
}

std::string to_string(EndType t) {
    switch (t) {
        case EndType::Catenoid:
            return "Catenoid";
        case EndType::Enneper:
            return "Enneper";
        default:
            return "Other";
    }
}

EndType classify(int ord_g, int ord_eta) {
    if (std::abs(ord_g) != 1) return EndType::Other;
    if (ord_eta == -1) return EndType::Catenoid;
    if (ord_eta == -3) return EndType::Enneper;
    return EndType::Other;
}

std::pair<double, double> default_truncation(const WeierstrassData& wd) {
    if (!wd.curve) return {1e-2, 10.0};
    std::vector<double> pts = wd.curve->branch_points();
    pts.push_back(0.0);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    double gap = kInf;
    for (std::size_t i = 1; i < pts.size(); ++i) gap = std::min(gap, pts[i] - pts[i - 1]);
    double big = 0;
    for (double x : pts) big = std::max(big, std::abs(x));
    if (!std::isfinite(gap)) gap = 1.0;
    return {1e-3 * gap, 50.0 * std::max(big, 1.0)};
}

EndReport classify_ends(const WeierstrassData& wd) {
    EndReport rep;
    const auto pts = union_points(wd);
    const auto [rmin, rmax] = default_truncation(wd);
    for (const auto& p : wd.punctures) {
        EndInfo e;
        e.puncture = p;
        e.ord_g = function_order(wd, wd.gauss, p);
        e.ord_eta = form_order(wd, wd.eta, p);
        e.type = classify(e.ord_g, e.ord_eta);
        double r1;
        cplx centre = 0;
        if (p.at_infinity) {
            r1 = rmax;
        } else {
            centre = p.z;
            double gap = kInf;
            for (double y : pts) {
                if (y != p.z) gap = std::min(gap, std::abs(y - p.z));
            }
            r1 = 1e-3 * (std::isfinite(gap) ? gap : 1.0);
        }
        const cplx dir = std::polar(1.0, kPi / 3);
        const double l1 = 0.5 * std::log(conformal_factor_at(wd, centre + r1 * dir, 0));
        const double l2 = 0.5 * std::log(conformal_factor_at(wd, centre + 2 * r1 * dir, 0));
        e.growth = (l2 - l1) / std::log(2.0);
        e.complete = p.at_infinity ? e.growth >= -1.05 : e.growth <= -0.95;
        rep.ends.push_back(e);
    }
    return rep;
}

int SurfaceMesh::vertex_at(int s, int i, int j) const {
    const int rings = static_cast<int>(radii.size());
    return grid[static_cast<std::size_t>((s * rings + i) * angular + j)];
}

SurfaceMesh immerse(const WeierstrassData& wd, const MeshOptions& options) {
    const int n = options.angular;
    if (n < 8 || n % 2 != 0) throw std::invalid_argument("mesh density must be an even number >= 8");
    auto [rmin, rmax] = default_truncation(wd);
    if (options.r_min) rmin = *options.r_min;
    if (options.r_max) rmax = *options.r_max;
    if (!(rmin > 0) || !(rmax > rmin)) throw std::invalid_argument("truncation needs 0 < r_min < r_max");

    std::vector<double> branch;
    if (wd.curve) {
        for (double b : wd.curve->branch_points()) {
            if (b < 0) throw std::invalid_argument("meshing needs branch points >= 0");
            if (b == 0) continue;
            if (!(b > rmin && b < rmax)) throw std::invalid_argument("truncation must enclose the branch points");
            branch.push_back(b);
        }
    }
    // Inside a cut the crossing of the positive axis changes sheet.
    auto in_cut = [&](double r) {
        if (!wd.curve) return false;
        int below = 0;
        for (double b : wd.curve->branch_points()) below += b < r ? 1 : 0;
        return below % 2 == 1;
    };
    auto is_branch = [&](double r) { return std::find(branch.begin(), branch.end(), r) != branch.end(); };

    // Geometric radii with spacing close to the angular step, plus every branch point.
    const double h = 2 * kPi / n;
    const double span = std::log(rmax / rmin);
    const int m = std::max(1, static_cast<int>(std::ceil(span / h)));
    std::vector<double> radii;
    for (int k = 0; k <= m; ++k) {
        const double r = k == m ? rmax : rmin * std::exp(span * k / m);
        bool near = false;
        for (double b : branch) near = near || std::abs(std::log(r / b)) < 0.35 * h;
        if (!near || k == 0 || k == m) radii.push_back(r);
    }
    radii.insert(radii.end(), branch.begin(), branch.end());
    std::sort(radii.begin(), radii.end());
    for (std::size_t i = 1; i < radii.size(); ++i) {
        if (is_branch(radii[i]) && is_branch(radii[i - 1])) {
            radii.insert(radii.begin() + static_cast<std::ptrdiff_t>(i), std::sqrt(radii[i] * radii[i - 1]));
        }
    }

    SurfaceMesh mesh;
    mesh.angular = n;
    mesh.radii = radii;
    mesh.sheets = wd.curve ? 2 : 1;
    const int rings = static_cast<int>(radii.size());
    mesh.grid.assign(static_cast<std::size_t>(mesh.sheets * rings * n), -1);
    auto slot = [&](int s, int i, int j) -> int& {
        return mesh.grid[static_cast<std::size_t>((s * rings + i) * n + j)];
    };
    for (int s = 0; s < mesh.sheets; ++s) {
        for (int i = 0; i < rings; ++i) {
            const double r = radii[static_cast<std::size_t>(i)];
            for (int j = 0; j < n; ++j) {
                if (s == 1 && j == 0 && is_branch(r)) {
                    slot(s, i, j) = slot(0, i, 0);
                    continue;
                }
                cplx z;
                if (j == 0) {
                    z = cplx(r, 0.0);
                } else if (2 * j == n) {
                    z = cplx(-r, 0.0);
                } else {
                    z = std::polar(r, h * j);
                }
                slot(s, i, j) = static_cast<int>(mesh.z.size());
                mesh.z.push_back(z);
                mesh.sheet.push_back(s);
                mesh.ring.push_back(i);
                mesh.column.push_back(j);
            }
        }
    }
    auto wrap_sheet = [&](int s, int i) { return in_cut(radii[static_cast<std::size_t>(i)]) ? 1 - s : s; };
    auto corner = [&](int s, int i, int j) { return j < n ? slot(s, i, j) : slot(wrap_sheet(s, i), i, 0); };

    struct Edge {
        int u, v, sheet;
    };
    std::vector<Edge> edges;
    std::map<std::pair<int, int>, std::size_t> edge_index;
    auto add_edge = [&](int u, int v, int sheet) {
        const auto key = std::minmax(u, v);
        if (edge_index.count(key)) return;
        edge_index[key] = edges.size();
        edges.push_back({u, v, sheet});
    };
    for (int s = 0; s < mesh.sheets; ++s) {
        for (int i = 0; i + 1 < rings; ++i) {
            for (int j = 0; j < n; ++j) {
                const int a = corner(s, i, j), b = corner(s, i + 1, j);
                const int c = corner(s, i + 1, j + 1), d = corner(s, i, j + 1);
                mesh.triangles.push_back({a, b, c});
                mesh.triangles.push_back({a, c, d});
                add_edge(a, b, s);
                add_edge(b, c, s);
                add_edge(a, c, s);
                add_edge(a, d, s);
                // The stitched side lies on the positive axis: integrate it
                // from above on the sheet it is continued to.
                if (j + 1 == n) {
                    const int ii = is_branch(radii[static_cast<std::size_t>(i)]) ? i + 1 : i;
                    add_edge(d, c, wrap_sheet(s, ii));
                } else {
                    add_edge(d, c, s);
                }
            }
        }
    }

    const PhiEvaluator phi(wd);
    std::vector<Vec3> delta(edges.size());
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const auto& e = edges[k];
        delta[k] = edge_integral(phi, mesh.z[static_cast<std::size_t>(e.u)], mesh.z[static_cast<std::size_t>(e.v)],
                                 e.sheet, options.quad_tol);
    }

    const std::size_t nv = mesh.z.size();
    std::vector<std::vector<std::pair<std::size_t, int>>> adj(nv);
    for (std::size_t k = 0; k < edges.size(); ++k) {
        adj[static_cast<std::size_t>(edges[k].u)].push_back({k, edges[k].v});
        adj[static_cast<std::size_t>(edges[k].v)].push_back({k, edges[k].u});
    }
    mesh.root = slot(0, rings / 2, n / 4);
    mesh.positions.assign(nv, Vec3{0, 0, 0});
    std::vector<char> seen(nv, 0), tree(edges.size(), 0);
    std::deque<int> queue{mesh.root};
    seen[static_cast<std::size_t>(mesh.root)] = 1;
    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        for (const auto& [k, v] : adj[static_cast<std::size_t>(u)]) {
            if (seen[static_cast<std::size_t>(v)]) continue;
            seen[static_cast<std::size_t>(v)] = 1;
            tree[k] = 1;
            const double sign = edges[k].u == u ? 1.0 : -1.0;
            const Vec3& x = mesh.positions[static_cast<std::size_t>(u)];
            mesh.positions[static_cast<std::size_t>(v)] = {x[0] + sign * delta[k][0], x[1] + sign * delta[k][1],
                                                           x[2] + sign * delta[k][2]};
            queue.push_back(v);
        }
    }
    double leak = 0;
    for (std::size_t k = 0; k < edges.size(); ++k) {
        if (tree[k]) continue;
        const Vec3 d = sub(mesh.positions[static_cast<std::size_t>(edges[k].v)],
                           mesh.positions[static_cast<std::size_t>(edges[k].u)]);
        for (int c = 0; c < 3; ++c) leak = std::max(leak, std::abs(d[c] - delta[k][c]));
    }
    mesh.period_leak = leak;

    mesh.normals.resize(nv);
    for (std::size_t v = 0; v < nv; ++v) mesh.normals[v] = normal_at(wd, mesh.z[v], mesh.sheet[v]);

    for (int i : {0, rings - 1}) {
        std::vector<char> used(static_cast<std::size_t>(mesh.sheets), 0);
        for (int s0 = 0; s0 < mesh.sheets; ++s0) {
            if (used[static_cast<std::size_t>(s0)]) continue;
            std::vector<int> loop;
            int s = s0;
            do {
                used[static_cast<std::size_t>(s)] = 1;
                for (int j = 0; j < n; ++j) loop.push_back(slot(s, i, j));
                s = wrap_sheet(s, i);
            } while (s != s0);
            mesh.boundary_loops.push_back(loop);
        }
    }

    if (leak > 10 * options.path_tol) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "period leak %.3e exceeds %.3e", leak, 10 * options.path_tol);
        throw PeriodLeak(buf, leak);
    }
    return mesh;
}

Diagnostics diagnostics(const WeierstrassData& wd, const SurfaceMesh& mesh) {
    Diagnostics d;
    d.gauss_degree = gauss_degree(wd);
    d.expected_curvature = -4 * kPi * d.gauss_degree;
    for (const auto& t : mesh.triangles) {
        d.total_curvature += solid_angle(mesh.normals[static_cast<std::size_t>(t[0])],
                                         mesh.normals[static_cast<std::size_t>(t[1])],
                                         mesh.normals[static_cast<std::size_t>(t[2])]);
    }
    if (d.expected_curvature != 0) {
        d.curvature_relative_error = std::abs(d.total_curvature - d.expected_curvature) / std::abs(d.expected_curvature);
    }

    // At a branch point the factor is taken in the local coordinate s^2 = z - t.
    d.conformal_factor.resize(mesh.z.size());
    for (std::size_t v = 0; v < mesh.z.size(); ++v) {
        const cplx z = mesh.z[v];
        if (z.imag() == 0.0 && wd.is_branch_point(z.real())) {
            const double delta = 1e-8 * (1.0 + std::abs(z));
            d.conformal_factor[v] = 4 * delta * conformal_factor_at(wd, z + cplx(0, delta), mesh.sheet[v]);
        } else {
            d.conformal_factor[v] = conformal_factor_at(wd, z, mesh.sheet[v]);
        }
    }

    // First fundamental form in (log r, theta). Stencils within four grid steps
    // of a branch point are skipped: the map behaves like sqrt(z - t) there.
    const int n = mesh.angular;
    const int rings = static_cast<int>(mesh.radii.size());
    const double h = 2 * kPi / n;
    std::vector<double> aniso;
    for (int s = 0; s < mesh.sheets; ++s) {
        for (int i = 1; i + 1 < rings; ++i) {
            const double um = std::log(mesh.radii[static_cast<std::size_t>(i - 1)]);
            const double u0 = std::log(mesh.radii[static_cast<std::size_t>(i)]);
            const double up = std::log(mesh.radii[static_cast<std::size_t>(i + 1)]);
            const double dm = u0 - um, dp = up - u0;
            const double wm = -dp / (dm * (dm + dp)), w0 = (dp - dm) / (dm * dp), wp = dm / (dp * (dm + dp));
            for (int j = 1; j + 1 < n; ++j) {
                const cplx z = mesh.z[static_cast<std::size_t>(mesh.vertex_at(s, i, j))];
                bool near_branch = false;
                if (wd.curve) {
                    for (double b : wd.curve->branch_points()) {
                        near_branch = near_branch || std::abs(z - b) < 4 * h * std::abs(z);
                    }
                }
                if (near_branch) continue;
                const auto& xm = mesh.positions[static_cast<std::size_t>(mesh.vertex_at(s, i - 1, j))];
                const auto& x0 = mesh.positions[static_cast<std::size_t>(mesh.vertex_at(s, i, j))];
                const auto& xp = mesh.positions[static_cast<std::size_t>(mesh.vertex_at(s, i + 1, j))];
                const auto& xl = mesh.positions[static_cast<std::size_t>(mesh.vertex_at(s, i, j - 1))];
                const auto& xr = mesh.positions[static_cast<std::size_t>(mesh.vertex_at(s, i, j + 1))];
                Vec3 xu, xt;
                for (int c = 0; c < 3; ++c) {
                    xu[static_cast<std::size_t>(c)] = wm * xm[c] + w0 * x0[c] + wp * xp[c];
                    xt[static_cast<std::size_t>(c)] = (xr[c] - xl[c]) / (2 * h);
                }
                const double e = dot(xu, xu), g = dot(xt, xt), f = dot(xu, xt);
                aniso.push_back(std::max(std::abs(e - g), 2 * std::abs(f)) / (e + g));
            }
        }
    }
    if (!aniso.empty()) {
        d.anisotropy_max = *std::max_element(aniso.begin(), aniso.end());
        std::nth_element(aniso.begin(), aniso.begin() + static_cast<std::ptrdiff_t>(aniso.size() / 2), aniso.end());
        d.anisotropy_median = aniso[aniso.size() / 2];
    }

    std::map<std::pair<int, int>, int> edges;
    for (const auto& t : mesh.triangles) {
        for (int k = 0; k < 3; ++k) edges[std::minmax(t[static_cast<std::size_t>(k)], t[static_cast<std::size_t>((k + 1) % 3)])] = 1;
    }
    d.euler_characteristic = static_cast<int>(mesh.positions.size()) - static_cast<int>(edges.size()) +
                             static_cast<int>(mesh.triangles.size());
    d.boundary_loops = mesh.boundary_loops.size();
    d.triangles = mesh.triangles.size();
    d.period_leak = mesh.period_leak;
    return d;
}

void write_obj(const SurfaceMesh& mesh, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open " + path);
    for (const auto& x : mesh.positions) std::fprintf(f, "v %.9g %.9g %.9g\n", x[0], x[1], x[2]);
    for (const auto& x : mesh.normals) std::fprintf(f, "vn %.9g %.9g %.9g\n", x[0], x[1], x[2]);
    for (const auto& t : mesh.triangles) {
        std::fprintf(f, "f %d//%d %d//%d %d//%d\n", t[0] + 1, t[0] + 1, t[1] + 1, t[1] + 1, t[2] + 1, t[2] + 1);
    }
    std::fclose(f);
}

void write_ply(const SurfaceMesh& mesh, const std::string& path) {
    static_assert(std::endian::native == std::endian::little, "PLY writer assumes a little-endian host");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "ply\nformat binary_little_endian 1.0\n"
        << "element vertex " << mesh.positions.size() << "\n"
        << "property double x\nproperty double y\nproperty double z\n"
        << "property double nx\nproperty double ny\nproperty double nz\n"
        << "element face " << mesh.triangles.size() << "\n"
        << "property list uchar int vertex_indices\nend_header\n";
    for (std::size_t v = 0; v < mesh.positions.size(); ++v) {
        out.write(reinterpret_cast<const char*>(mesh.positions[v].data()), 3 * sizeof(double));
        out.write(reinterpret_cast<const char*>(mesh.normals[v].data()), 3 * sizeof(double));
    }
    for (const auto& t : mesh.triangles) {
        const unsigned char three = 3;
        out.write(reinterpret_cast<const char*>(&three), 1);
        out.write(reinterpret_cast<const char*>(t.data()), 3 * sizeof(int));
    }
}

}  // namespace minsurf::surface
