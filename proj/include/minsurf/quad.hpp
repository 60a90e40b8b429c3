#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <queue>
#include <vector>

#include "minsurf/errors.hpp"
#include "minsurf/rational.hpp"

namespace minsurf::quad {

using cplx = std::complex<double>;

// c * prod (z - t_i)^{e_i}. Points strictly increasing, prefactor > 0.
class SingularFactorization {
public:
    SingularFactorization() = default;
    SingularFactorization(std::vector<double> points, std::vector<Rational> exponents,
                          double prefactor = 1.0);

    const std::vector<double>& points() const { return points_; }
    const std::vector<Rational>& exponents() const { return exponents_; }
    double prefactor() const { return prefactor_; }
    std::size_t size() const { return points_.size(); }

    // Index of the singular point equal to x, or -1.
    int index_of(double x) const;
    SingularFactorization scaled(double s) const;

private:
    std::vector<double> points_;
    std::vector<Rational> exponents_;
    double prefactor_ = 1.0;
};

struct IntegrationPath {
    std::vector<cplx> waypoints;
};

constexpr double kDefaultTol = 1e-12;
constexpr int kMaxDepth = 40;

// Pointwise value with the principal branch; on the real axis the value is the
// limit from the upper half-plane.
cplx evaluate(const SingularFactorization& f, cplx z);

// Integral over the real segment [a, b]; endpoints may be singular points with
// exponent > -1.
cplx integrate_segment(const SingularFactorization& f, double a, double b, double tol = kDefaultTol);

// Same as integrate_segment but endpoint exponents in (-2, -1) are allowed and
// the Hadamard finite part is returned. This equals the analytic continuation
// in the exponent, so loop integrals still reduce to it.
cplx integrate_segment_finite_part(const SingularFactorization& f, double a, double b,
                                   double tol = kDefaultTol);

// Integral along a polyline with continuous branch tracking. The first and last
// waypoints may be singular points (integrable exponents); interior waypoints
// may not. Branch at the start is the principal one (upper limit on the real
// axis); at a singular start the direction of the first leg is used.
cplx integrate_path(const SingularFactorization& f, const IntegrationPath& path,
                    double tol = kDefaultTol);

// Gauss rule on [-1, 1] for the weight (1 - x)^alpha (1 + x)^beta.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussRule& jacobi_rule(int n, double alpha, double beta);

namespace detail {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(cplx v) { return std::abs(v); }
template <std::size_t N>
double magnitude(const std::array<cplx, N>& v) {
    double s = 0;
    for (const auto& x : v) s += std::abs(x);
    return s;
}

template <class T>
T zero_like() {
    if constexpr (std::is_arithmetic_v<T> || std::is_same_v<T, cplx>) {
        return T(0);
    } else {
        T t;
        for (auto& x : t) x = 0;
        return t;
    }
}

template <class T>
void axpy(T& acc, double w, const T& v) {
    if constexpr (std::is_arithmetic_v<T> || std::is_same_v<T, cplx>) {
        acc += w * v;
    } else {
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * v[i];
    }
}

template <class T>
T diff(const T& a, const T& b) {
    if constexpr (std::is_arithmetic_v<T> || std::is_same_v<T, cplx>) {
        return a - b;
    } else {
        T r = a;
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
        return r;
    }
}

}  // namespace detail

// Adaptive composite Gauss-Jacobi quadrature of
//   int_a^b (t - a)^alpha (b - t)^beta g(t) dt
// with g smooth on (a, b). Panels touching a (resp. b) carry the Jacobi
// weight; interior panels are Gauss-Legendre. The worst panel is bisected
// until the summed error estimate is below
//   max(tol * min(L1, 1 + |I|), 1e-15 * L1)
// where L1 is the integral of |weight * g|.
template <class T, class G>
T integrate_weighted(G&& g, double a, double b, double alpha, double beta, double tol,
                     int max_depth = kMaxDepth) {
    constexpr int kLow = 12;
    constexpr int kHigh = 24;
    struct Panel {
        double lo, hi;
        int depth;
        T value;
        double err;
        double l1;
        bool operator<(const Panel& o) const { return err < o.err; }
    };

    auto eval_panel = [&](double lo, double hi, int depth) {
        const double al = (lo == a) ? alpha : 0.0;
        const double be = (hi == b) ? beta : 0.0;
        const double h = 0.5 * (hi - lo);
        const double jac = std::pow(h, 1.0 + al + be);
        // Weight factors of the endpoints not absorbed by the rule.
        auto outer = [&](double t) {
            double w = 1.0;
            if (al == 0.0 && alpha != 0.0) w *= std::pow(t - a, alpha);
            if (be == 0.0 && beta != 0.0) w *= std::pow(b - t, beta);
            return w;
        };
        const GaussRule& lo_rule = jacobi_rule(kLow, be, al);
        const GaussRule& hi_rule = jacobi_rule(kHigh, be, al);
        T q_lo = detail::zero_like<T>();
        T q_hi = detail::zero_like<T>();
        double l1 = 0;
        for (int k = 0; k < kLow; ++k) {
            const double t = lo + h * (1.0 + lo_rule.nodes[k]);
            detail::axpy(q_lo, jac * lo_rule.weights[k] * outer(t), g(t));
        }
        for (int k = 0; k < kHigh; ++k) {
            const double t = lo + h * (1.0 + hi_rule.nodes[k]);
            const T v = g(t);
            const double w = jac * hi_rule.weights[k] * outer(t);
            detail::axpy(q_hi, w, v);
            l1 += std::abs(w) * detail::magnitude(v);
        }
        const double err = detail::magnitude(detail::diff(q_hi, q_lo));
        if (!std::isfinite(err) || !std::isfinite(l1)) {
            throw NoConvergence("non-finite integrand value during quadrature");
        }
        return Panel{lo, hi, depth, q_hi, err, l1};
    };

    std::priority_queue<Panel> heap;
    if (alpha != 0.0 && beta != 0.0) {
        const double m = 0.5 * (a + b);
        heap.push(eval_panel(a, m, 1));
        heap.push(eval_panel(m, b, 1));
    } else {
        heap.push(eval_panel(a, b, 0));
    }

    constexpr int kMaxPanels = 20000;
    T total = detail::zero_like<T>();
    double err = 0, l1 = 0;
    {
        auto copy = heap;
        while (!copy.empty()) {
            detail::axpy(total, 1.0, copy.top().value);
            err += copy.top().err;
            l1 += copy.top().l1;
            copy.pop();
        }
    }
    while (true) {
        const double target =
            std::max(tol * std::min(l1, 1.0 + detail::magnitude(total)), 1e-15 * l1);
        if (err <= target) break;
        Panel worst = heap.top();
        if (worst.depth >= max_depth || static_cast<int>(heap.size()) >= kMaxPanels) {
            throw NoConvergence("quadrature tolerance not reached at maximum subdivision depth");
        }
        heap.pop();
        const double m = 0.5 * (worst.lo + worst.hi);
        Panel left = eval_panel(worst.lo, m, worst.depth + 1);
        Panel right = eval_panel(m, worst.hi, worst.depth + 1);
        detail::axpy(total, -1.0, worst.value);
        detail::axpy(total, 1.0, left.value);
        detail::axpy(total, 1.0, right.value);
        err += left.err + right.err - worst.err;
        l1 += left.l1 + right.l1 - worst.l1;
        heap.push(std::move(left));
        heap.push(std::move(right));
    }
    // Re-sum from the panels to avoid drift in the running total.
    T exact = detail::zero_like<T>();
    while (!heap.empty()) {
        detail::axpy(exact, 1.0, heap.top().value);
        heap.pop();
    }
    return exact;
}

}  // namespace minsurf::quad
