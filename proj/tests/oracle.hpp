#pragma once

// Reference computations used only by the tests. Nothing here calls into the
// library, so agreement is an independent check.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

// prod (t - x_i)^{p_i/q_i} with the value on the real axis taken as the limit
// from the upper half-plane.
struct Power {
    double x;
    int p;
    int q;
};

inline cplx real_axis_value(const std::vector<Power>& factors, double t, double prefactor = 1.0) {
    cplx v = prefactor;
    for (const auto& f : factors) {
        const double e = static_cast<double>(f.p) / f.q;
        const double d = t - f.x;
        v *= std::pow(std::abs(d), e);
        if (d < 0) v *= std::polar(1.0, kPi * e);
    }
    return v;
}

// Gauss-Kronrod 7/15 on [a, b] with recursive bisection until every panel's
// Kronrod-Gauss difference is below tol (absolute, not split between halves).
inline cplx gk15(const std::function<cplx(double)>& f, double a, double b, double tol, int depth = 0) {
    static const double xk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                 0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                 0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
    static const double wk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                 0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                 0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    static const double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                 0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    cplx fc = f(c);
    cplx kron = wk[7] * fc;
    cplx gauss = wg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const cplx f1 = f(c - h * xk[i]);
        const cplx f2 = f(c + h * xk[i]);
        kron += wk[i] * (f1 + f2);
        if (i % 2 == 1) gauss += wg[i / 2] * (f1 + f2);
    }
    kron *= h;
    gauss *= h;
    if (std::abs(kron - gauss) <= tol + 1e-15 * std::abs(kron) || depth > 30) return kron;
    return gk15(f, a, c, tol, depth + 1) + gk15(f, c, b, tol, depth + 1);
}

// Integral over [a, b] of the product, where a and b may carry exponents
// p/q > -1. Each half is mapped by t = end + h u^q, which turns the endpoint
// singularity into a polynomial factor. tol is relative to a first estimate.
inline cplx segment(const std::vector<Power>& factors, double a, double b, double prefactor = 1.0,
                    double tol = 1e-14) {
    const double h = 0.5 * (b - a);
    // The factor sitting at the endpoint is evaluated as h^e u^p so it never
    // rounds onto the singular point.
    auto half_interval = [&](double end, double dir, double abs_tol) {
        std::vector<Power> rest;
        Power at{end, 0, 1};
        for (const auto& f : factors) (f.x == end ? at : rest.emplace_back(f)) = f;
        const int q = at.q;
        const double e = static_cast<double>(at.p) / at.q;
        const cplx phase = dir < 0 ? std::polar(1.0, kPi * e) : cplx(1.0);
        auto g = [&](double u) {
            const double t = end + dir * h * std::pow(u, q);
            const cplx local = phase * std::pow(h, e) * std::pow(u, at.p);
            return real_axis_value(rest, t, prefactor) * local * (h * q * std::pow(u, q - 1));
        };
        return gk15(g, 0.0, 1.0, abs_tol);
    };
    const cplx rough = half_interval(a, 1.0, 1e-6 * h) + half_interval(b, -1.0, 1e-6 * h);
    const double abs_tol = tol * std::abs(rough);
    return half_interval(a, 1.0, abs_tol) + half_interval(b, -1.0, abs_tol);
}

inline double agm(double a, double b) {
    for (int i = 0; i < 60 && std::abs(a - b) > 1e-16 * a; ++i) {
        const double n = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = n;
    }
    return a;
}

// Complete elliptic integral of the first kind with modulus k.
inline double ellip_k(double k) { return kPi / (2.0 * agm(1.0, std::sqrt(1.0 - k * k))); }

// For a right-angled quadrilateral with vertices x1 < x2 < x3 < x4 on the real
// axis, the ratio |F(x3) - F(x2)| / |F(x2) - F(x1)|.
inline double rectangle_ratio(double x1, double x2, double x3, double x4) {
    const double lambda = (x3 - x2) * (x4 - x1) / ((x3 - x1) * (x4 - x2));
    const double k = ((2.0 - lambda) - 2.0 * std::sqrt(1.0 - lambda)) / lambda;
    return 2.0 * ellip_k(k) / ellip_k(std::sqrt(1.0 - k * k));
}

// Integral of 1/sqrt(z^2 - 1) counterclockwise along the circle |z| = radius,
// trapezoid rule with the square root chosen for continuity at every node.
inline cplx loop_inverse_sqrt(double radius, int nodes = 4000) {
    cplx total = 0;
    cplx prev = std::sqrt(cplx(radius * radius - 1.0));
    for (int k = 0; k < nodes; ++k) {
        const double th = 2.0 * kPi * k / nodes;
        const cplx z = std::polar(radius, th);
        cplx w = std::sqrt(z * z - 1.0);
        if (std::abs(w - prev) > std::abs(w + prev)) w = -w;
        prev = w;
        const cplx dz = cplx(0, 1) * z * (2.0 * kPi / nodes);
        total += dz / w;
    }
    return total;
}

}  // namespace oracle
