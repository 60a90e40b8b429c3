#include "minsurf/orthodisk.hpp"

#include <algorithm>
#include <cmath>

namespace minsurf::orthodisk {

EnhancedOrthodisk::EnhancedOrthodisk(scmap::SCData sc, std::vector<std::size_t> marked)
    : sc_(std::move(sc)), marked_(std::move(marked)) {
    if (marked_.size() % 2 != 1) throw std::invalid_argument("marked vertex set must have odd size");
    for (std::size_t k = 0; k < marked_.size(); ++k) {
        if (marked_[k] >= sc_.size()) throw std::invalid_argument("marked index out of range");
        if (k > 0 && marked_[k] <= marked_[k - 1]) throw std::invalid_argument("marked indices must increase");
    }
    for (std::size_t i = 0; i < sc_.size(); ++i) {
        const Rational a = sc_.vertex_data[i];
        const bool ok = is_marked(i) ? (Rational(2) * a).is_integer() : a.is_integer();
        if (!ok) throw std::invalid_argument("vertex data does not lift to the double cover");
    }
}

bool EnhancedOrthodisk::is_marked(std::size_t i) const {
    return std::binary_search(marked_.begin(), marked_.end(), i);
}

hyperell::HyperellipticCurve EnhancedOrthodisk::curve() const {
    std::vector<double> b;
    for (std::size_t i : marked_) b.push_back(sc_.vertices[i]);
    return hyperell::HyperellipticCurve(b);
}

hyperell::LiftedForm EnhancedOrthodisk::lifted_form() const {
    return hyperell::lift_form(curve(), sc_.integrand());
}

int DivisorTable::degree() const {
    int d = 0;
    for (const auto& e : entries) d += e.lifts * e.order;
    return d;
}

DivisorTable divisor(const EnhancedOrthodisk& x) {
    DivisorTable table;
    const auto& sc = x.sc();
    Rational total = 0;
    for (std::size_t i = 0; i < sc.size(); ++i) {
        const Rational e = sc.vertex_data[i] - 1;
        total += e;
        DivisorRow row;
        row.vertex = i;
        if (x.is_marked(i)) {
            row.order = static_cast<int>((Rational(2) * sc.vertex_data[i] - 1).num());
        } else {
            row.lifts = 2;
            row.order = static_cast<int>(e.num());
        }
        row.cone_angle = 2.0 * (row.order + 1);
        table.entries.push_back(row);
    }
    DivisorRow inf;
    inf.at_infinity = true;
    inf.order = static_cast<int>((Rational(-2) * total - 3).num());
    inf.cone_angle = 2.0 * (inf.order + 1);
    table.entries.push_back(inf);
    return table;
}

quad::SingularFactorization build_eta(const EnhancedOrthodisk& x, const EnhancedOrthodisk& y) {
    if (x.sc().vertices != y.sc().vertices || x.marked() != y.marked()) {
        throw MismatchedPolygons("orthodisks must share vertices and marked set");
    }
    std::vector<Rational> ex;
    for (std::size_t i = 0; i < x.sc().size(); ++i) {
        const Rational s = x.sc().vertex_data[i] + y.sc().vertex_data[i];
        if (!s.is_even_integer()) throw ParityViolation("a_j + b_j must be an even integer");
        ex.push_back(s / 2 - 1);
    }
    return quad::SingularFactorization(x.sc().vertices, ex, std::sqrt(x.sc().scale * y.sc().scale));
}

void ConjugacyReport::add(std::string label, double r) {
    labels.push_back(std::move(label));
    residuals.push_back(r);
    max_residual = std::max(max_residual, r);
}

ConjugacyReport conjugacy_report(const EnhancedOrthodisk& x, const EnhancedOrthodisk& y, double tol) {
    if (x.marked().size() != y.marked().size()) {
        throw MismatchedPolygons("marked sets differ in size");
    }
    const auto fx = x.lifted_form();
    const auto fy = y.lifted_form();
    ConjugacyReport rep;
    for (const auto& cyc : hyperell::basis_cycles(fx.curve())) {
        const auto px = hyperell::period(fx, cyc, tol);
        const auto py = hyperell::period(fy, cyc, tol);
        rep.add(cyc.label(), std::abs(px - std::conj(py)));
    }
    const double zx = x.sc().vertices[x.marked().front()];
    const double zy = y.sc().vertices[y.marked().front()];
    rep.add("end:first-marked", std::abs(hyperell::end_loop_period(fx, hyperell::Puncture::at(zx), tol) -
                                         std::conj(hyperell::end_loop_period(fy, hyperell::Puncture::at(zy), tol))));
    rep.add("end:inf", std::abs(hyperell::end_loop_period(fx, hyperell::Puncture::infinity(), tol) -
                                std::conj(hyperell::end_loop_period(fy, hyperell::Puncture::infinity(), tol))));
    return rep;
}

std::vector<double> normalized_vertices(const std::vector<double>& t) {
    std::vector<double> out(t.size());
    const double d = t.back() - t.front();
    for (std::size_t i = 0; i < t.size(); ++i) out[i] = (t[i] - t.front()) / d;
    return out;
}

double reflexivity_residual(const EnhancedOrthodisk& x, const EnhancedOrthodisk& y) {
    if (x.sc().size() != y.sc().size()) throw MismatchedPolygons("vertex counts differ");
    const auto a = normalized_vertices(x.sc().vertices);
    const auto b = normalized_vertices(y.sc().vertices);
    double r = 0;
    for (std::size_t i = 0; i < a.size(); ++i) r = std::max(r, std::abs(a[i] - b[i]));
    return r;
}

}  // namespace minsurf::orthodisk
