#include "minsurf/quad.hpp"

#include <Eigen/Eigenvalues>
#include <map>
#include <mutex>
#include <tuple>

namespace minsurf::quad {

namespace {

constexpr double kPi = 3.14159265358979323846;

double span_of(const std::vector<double>& pts) {
    if (pts.size() < 2) return 1.0;
    return std::max(pts.back() - pts.front(), 1e-300);
}

// Argument with the real-axis convention: points on the negative real axis get +pi.
double upper_arg(cplx z) {
    if (z.imag() == 0.0) return z.real() < 0 ? kPi : 0.0;
    return std::arg(z);
}

GaussRule golub_welsch(int n, double alpha, double beta) {
    Eigen::VectorXd diag(n), sub(std::max(n - 1, 1));
    const double ab = alpha + beta;
    for (int k = 0; k < n; ++k) {
        if (k == 0) {
            diag(k) = (beta - alpha) / (ab + 2.0);
        } else {
            const double s = 2.0 * k + ab;
            diag(k) = (beta * beta - alpha * alpha) / (s * (s + 2.0));
        }
    }
    for (int k = 1; k < n; ++k) {
        double b2;
        if (k == 1) {
            b2 = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
        } else {
            const double s = 2.0 * k + ab;
            b2 = 4.0 * k * (k + alpha) * (k + beta) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0));
        }
        sub(k - 1) = std::sqrt(b2);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub.head(std::max(n - 1, 0)), Eigen::ComputeEigenvectors);
    const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) +
                                std::lgamma(beta + 1.0) - std::lgamma(ab + 2.0));
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int k = 0; k < n; ++k) {
        rule.nodes[k] = es.eigenvalues()(k);
        const double v = es.eigenvectors()(0, k);
        rule.weights[k] = mu0 * v * v;
    }
    return rule;
}

void check_near_coincident(const SingularFactorization& f) {
    const auto& p = f.points();
    const double span = span_of(p);
    for (std::size_t i = 1; i < p.size(); ++i) {
        if (p[i] - p[i - 1] < 1e-10 * span) {
            throw InteriorSingularity("near-coincident singular points");
        }
    }
}

// sum over i != skip of e_i log|t - t_i|, plus log c.
double log_abs_rest(const SingularFactorization& f, double t, int skip_a, int skip_b) {
    double s = std::log(f.prefactor());
    const auto& p = f.points();
    const auto& e = f.exponents();
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (static_cast<int>(i) == skip_a || static_cast<int>(i) == skip_b) continue;
        if (e[i].num() == 0) continue;
        s += e[i].to_double() * std::log(std::abs(t - p[i]));
    }
    return s;
}

// Phase of the integrand on a real interval whose right end is b.
cplx segment_phase(const SingularFactorization& f, double b) {
    double s = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f.points()[i] >= b) s += f.exponents()[i].to_double();
    }
    return std::polar(1.0, kPi * s);
}

struct SegmentSetup {
    int ia, ib;
    double alpha, beta;
};

SegmentSetup setup_segment(const SingularFactorization& f, double a, double b) {
    check_near_coincident(f);
    const double span = span_of(f.points());
    for (double t : f.points()) {
        if (t > a && t < b) throw InteriorSingularity("singular point inside integration segment");
        if (t != a && t != b && (std::abs(t - a) < 1e-10 * span || std::abs(t - b) < 1e-10 * span)) {
            throw InteriorSingularity("segment endpoint nearly coincides with a singular point");
        }
    }
    SegmentSetup s{f.index_of(a), f.index_of(b), 0.0, 0.0};
    if (s.ia >= 0) s.alpha = f.exponents()[s.ia].to_double();
    if (s.ib >= 0) s.beta = f.exponents()[s.ib].to_double();
    return s;
}

// Regular part of a half segment: int_lo^hi of the integrand, with Jacobi weight
// at whichever end is a singular point of exponent > -1.
double regular_piece(const SingularFactorization& f, double lo, double hi, int ilo, int ihi,
                     double tol) {
    const double al = ilo >= 0 ? f.exponents()[ilo].to_double() : 0.0;
    const double be = ihi >= 0 ? f.exponents()[ihi].to_double() : 0.0;
    auto g = [&](double t) { return std::exp(log_abs_rest(f, t, ilo, ihi)); };
    return integrate_weighted<double>(g, lo, hi, al, be, tol);
}

// Finite part of int over [s, m] (left = true, singular end s is the left end)
// or [m, s] (left = false) where s = t_is has exponent e in (-2, -1).
double finite_part_piece(const SingularFactorization& f, int is, double m, bool left, double tol) {
    const double s = f.points()[is];
    const double e = f.exponents()[is].to_double();
    const double gs = std::exp(log_abs_rest(f, s, is, -1));
    auto h = [&](double t) {
        // (g(t) - g(s)) / |t - s| computed without cancellation.
        double acc = 0;
        const auto& p = f.points();
        const auto& ex = f.exponents();
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (static_cast<int>(i) == is || ex[i].num() == 0) continue;
            acc += ex[i].to_double() * std::log1p((t - s) / (s - p[i]));
        }
        return gs * std::expm1(acc) / std::abs(t - s);
    };
    const double len = std::abs(m - s);
    const double boundary = gs * std::pow(len, e + 1.0) / (e + 1.0);
    double body;
    if (left) {
        body = integrate_weighted<double>(h, s, m, e + 1.0, 0.0, tol);
    } else {
        body = integrate_weighted<double>(h, m, s, 0.0, e + 1.0, tol);
    }
    return body + boundary;
}

}  // namespace

SingularFactorization::SingularFactorization(std::vector<double> points,
                                             std::vector<Rational> exponents, double prefactor)
    : points_(std::move(points)), exponents_(std::move(exponents)), prefactor_(prefactor) {
    if (points_.size() != exponents_.size()) {
        throw std::invalid_argument("singular points and exponents differ in length");
    }
    for (std::size_t i = 1; i < points_.size(); ++i) {
        if (!(points_[i] > points_[i - 1])) {
            throw std::invalid_argument("singular points must be strictly increasing");
        }
    }
    if (!(prefactor_ > 0) || !std::isfinite(prefactor_)) {
        throw std::invalid_argument("prefactor must be positive and finite");
    }
}

int SingularFactorization::index_of(double x) const {
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (points_[i] == x) return static_cast<int>(i);
    }
    return -1;
}

SingularFactorization SingularFactorization::scaled(double s) const {
    return SingularFactorization(points_, exponents_, prefactor_ * s);
}

const GaussRule& jacobi_rule(int n, double alpha, double beta) {
    static std::mutex mu;
    static std::map<std::tuple<int, double, double>, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(n, alpha, beta);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, golub_welsch(n, alpha, beta)).first;
    return it->second;
}

cplx evaluate(const SingularFactorization& f, cplx z) {
    double lg = std::log(f.prefactor());
    double ar = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const Rational e = f.exponents()[i];
        if (e.num() == 0) continue;
        const cplx d = z - f.points()[i];
        if (d == cplx(0)) {
            if (e > Rational(0)) return 0;
            throw NonIntegrable("evaluation at a pole");
        }
        lg += e.to_double() * std::log(std::abs(d));
        ar += e.to_double() * upper_arg(d);
    }
    return std::polar(std::exp(lg), ar);
}

cplx integrate_segment(const SingularFactorization& f, double a, double b, double tol) {
    if (a == b) return 0;
    if (a > b) return -integrate_segment(f, b, a, tol);
    const SegmentSetup s = setup_segment(f, a, b);
    if (s.alpha <= -1.0 || s.beta <= -1.0) {
        throw NonIntegrable("endpoint exponent <= -1");
    }
    return segment_phase(f, b) * regular_piece(f, a, b, s.ia, s.ib, tol);
}

cplx integrate_segment_finite_part(const SingularFactorization& f, double a, double b, double tol) {
    if (a == b) return 0;
    if (a > b) return -integrate_segment_finite_part(f, b, a, tol);
    const SegmentSetup s = setup_segment(f, a, b);
    auto admissible = [](int idx, double e, const SingularFactorization& ff) {
        if (idx < 0 || e > -1.0) return;
        if (e <= -2.0 || ff.exponents()[idx].is_integer()) {
            throw NonIntegrable("finite part needs a non-integer endpoint exponent in (-2, -1)");
        }
    };
    admissible(s.ia, s.alpha, f);
    admissible(s.ib, s.beta, f);
    const double m = 0.5 * (a + b);
    const double left = (s.ia >= 0 && s.alpha <= -1.0) ? finite_part_piece(f, s.ia, m, true, tol)
                                                        : regular_piece(f, a, m, s.ia, -1, tol);
    const double right = (s.ib >= 0 && s.beta <= -1.0) ? finite_part_piece(f, s.ib, m, false, tol)
                                                        : regular_piece(f, m, b, -1, s.ib, tol);
    return segment_phase(f, b) * (left + right);
}

cplx integrate_path(const SingularFactorization& f, const IntegrationPath& path, double tol) {
    const auto& w = path.waypoints;
    if (w.size() < 2) return 0;
    const auto& p = f.points();
    const auto& ex = f.exponents();
    const std::size_t n = p.size();
    const double scale = 1.0 + (p.empty() ? 0.0 : std::max(std::abs(p.front()), std::abs(p.back())));

    auto singular_at = [&](cplx z) -> int {
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(z - p[i]) <= 1e-14 * scale) return static_cast<int>(i);
        }
        return -1;
    };

    for (std::size_t k = 1; k + 1 < w.size(); ++k) {
        if (singular_at(w[k]) >= 0) throw BranchAmbiguity("waypoint coincides with a singular point");
    }
    const int first_sing = singular_at(w.front());
    const int last_sing = singular_at(w.back());
    for (int idx : {first_sing, last_sing}) {
        if (idx >= 0 && ex[idx].to_double() <= -1.0) {
            throw NonIntegrable("path endpoint at a non-integrable singular point");
        }
    }

    std::vector<double> args(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (static_cast<int>(i) == first_sing) {
            args[i] = upper_arg(w[1] - w[0]);
        } else {
            args[i] = upper_arg(w[0] - p[i]);
        }
    }

    cplx total = 0;
    for (std::size_t k = 0; k + 1 < w.size(); ++k) {
        const cplx z0 = w[k], z1 = w[k + 1];
        const cplx d = z1 - z0;
        if (d == cplx(0)) continue;
        const int s0 = (k == 0) ? first_sing : -1;
        const int s1 = (k + 2 == w.size()) ? last_sing : -1;
        // The open segment must avoid every singular point.
        for (std::size_t i = 0; i < n; ++i) {
            if (static_cast<int>(i) == s0 || static_cast<int>(i) == s1) continue;
            const double tpar = std::clamp(std::real((p[i] - z0) * std::conj(d)) / std::norm(d), 0.0, 1.0);
            if (std::abs(z0 + tpar * d - p[i]) <= 1e-14 * scale) {
                throw BranchAmbiguity("path passes through a singular point");
            }
        }
        const double alpha = s0 >= 0 ? ex[s0].to_double() : 0.0;
        const double beta = s1 >= 0 ? ex[s1].to_double() : 0.0;
        auto g = [&](double s) -> cplx {
            const cplx z = z0 + s * d;
            double lg = std::log(f.prefactor());
            double ar = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const double e = ex[i].to_double();
                if (e == 0.0) continue;
                const int ii = static_cast<int>(i);
                if (ii == s0) {
                    lg += e * std::log(std::abs(d));
                    ar += e * args[i];
                } else if (ii == s1) {
                    lg += e * std::log(std::abs(z0 - p[i]));
                    ar += e * args[i];
                } else {
                    lg += e * std::log(std::abs(z - p[i]));
                    ar += e * (args[i] + std::arg((z - p[i]) / (z0 - p[i])));
                }
            }
            return std::polar(std::exp(lg), ar) * d;
        };
        total += integrate_weighted<cplx>(g, 0.0, 1.0, alpha, beta, tol);
        for (std::size_t i = 0; i < n; ++i) {
            const int ii = static_cast<int>(i);
            if (ii == s0 || ii == s1) continue;
            args[i] += std::arg((z1 - p[i]) / (z0 - p[i]));
        }
    }
    return total;
}

}  // namespace minsurf::quad
