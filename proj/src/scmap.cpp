#include "minsurf/scmap.hpp"

#include <cmath>
#include <numeric>

#include "minsurf/lm.hpp"

namespace minsurf::scmap {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<Rational> exponents_of(const std::vector<Rational>& a) {
    std::vector<Rational> e;
    e.reserve(a.size());
    for (Rational x : a) e.push_back(x - 1);
    return e;
}

// Phase of the integrand on edge k (between vertex k and k+1).
cplx edge_phase(const SCData& sc, std::size_t k) {
    double s = 0;
    for (std::size_t i = k + 1; i < sc.size(); ++i) s += (sc.vertex_data[i] - 1).to_double();
    return std::polar(1.0, kPi * s);
}

}  // namespace

SCData::SCData(double scale_, std::vector<double> vertices_, std::vector<Rational> vertex_data_,
               cplx base_point_)
    : scale(scale_), vertices(std::move(vertices_)), vertex_data(std::move(vertex_data_)),
      base_point(base_point_) {
    if (vertices.size() != vertex_data.size() || vertices.size() < 3) {
        throw std::invalid_argument("SC data needs n >= 3 vertices with matching vertex data");
    }
    for (std::size_t i = 1; i < vertices.size(); ++i) {
        if (!(vertices[i] > vertices[i - 1])) throw std::invalid_argument("vertices must increase");
    }
    if (!(scale > 0)) throw std::invalid_argument("SC scale must be positive");
    if (base_point.imag() <= 0) throw std::invalid_argument("base point must lie in the upper half-plane");
}

Rational SCData::angle_at_infinity() const {
    Rational s = 0;
    for (Rational a : vertex_data) s += a;
    return Rational(2) - s;
}

quad::SingularFactorization SCData::integrand() const {
    return quad::SingularFactorization(vertices, exponents_of(vertex_data), scale);
}

bool SCData::edge_regularized(std::size_t k) const {
    return vertex_data[k] <= Rational(0) || vertex_data[k + 1] <= Rational(0);
}

cplx evaluate(const SCData& sc, cplx z, double tol) {
    if (z.imag() < 0) throw std::invalid_argument("evaluation point must lie in the closed upper half-plane");
    const auto f = sc.integrand();
    if (z.imag() == 0.0) {
        const int idx = f.index_of(z.real());
        if (idx >= 0 && sc.vertex_data[idx] <= Rational(0)) {
            throw NonIntegrableVertex("vertex image is at infinity");
        }
    }
    return quad::integrate_path(f, quad::IntegrationPath{{sc.base_point, z}}, tol);
}

std::vector<double> signed_edge_lengths(const SCData& sc, double tol) {
    const auto f = sc.integrand();
    std::vector<double> out(sc.size() - 1);
    for (std::size_t k = 0; k + 1 < sc.size(); ++k) {
        const double a = sc.vertices[k], b = sc.vertices[k + 1];
        const cplx v = sc.edge_regularized(k) ? quad::integrate_segment_finite_part(f, a, b, tol)
                                              : quad::integrate_segment(f, a, b, tol);
        out[k] = std::real(v / edge_phase(sc, k));
    }
    return out;
}

PolygonImage polygon_image(const SCData& sc, double tol) {
    PolygonImage img;
    const std::size_t n = sc.size();
    const auto lengths = signed_edge_lengths(sc, tol);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        img.edge_vectors.push_back(lengths[k] * edge_phase(sc, k));
        img.edge_regularized.push_back(sc.edge_regularized(k));
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (sc.vertex_data[i] <= Rational(0)) {
            img.vertex_images.emplace_back(std::nullopt);
        } else {
            img.vertex_images.emplace_back(evaluate(sc, cplx(sc.vertices[i], 0.0), tol));
        }
        img.interior_angles.push_back(sc.vertex_data[i].to_double());
    }
    double total = 0;
    for (Rational a : sc.vertex_data) total += (a - 1).to_double();
    img.left_ray = -std::polar(1.0, kPi * total);
    img.right_ray = 1.0;
    return img;
}

ParameterSolution solve_parameter_problem(const std::vector<Rational>& vertex_data,
                                          const std::vector<double>& target_lengths,
                                          const Normalization& normalization,
                                          const ParameterOptions& options) {
    const std::size_t n = vertex_data.size();
    if (n < 3 || target_lengths.size() != n - 1) {
        throw std::invalid_argument("need n >= 3 vertices and n - 1 target lengths");
    }
    if (!(normalization.second > normalization.first)) {
        throw std::invalid_argument("normalization must keep the first two vertices ordered");
    }
    // A template SC object only used for edge classification.
    std::vector<double> dummy(n);
    std::iota(dummy.begin(), dummy.end(), 0.0);
    const SCData shape(1.0, dummy, vertex_data);

    std::size_t ref = n;
    double tmax = 0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (shape.edge_regularized(k)) continue;
        if (!(target_lengths[k] > 0)) throw DegenerateTarget("bounded edge target must be positive");
        if (target_lengths[k] > tmax) {
            tmax = target_lengths[k];
            ref = k;
        }
    }
    if (ref == n) throw DegenerateTarget("no bounded edge to fix the scale");
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (!shape.edge_regularized(k) && target_lengths[k] / tmax < 1e-8) {
            throw DegenerateTarget("target length ratio below 1e-8");
        }
    }

    const double gap0 = normalization.second - normalization.first;
    auto vertices_from = [&](const Eigen::VectorXd& u) {
        std::vector<double> t(n);
        t[0] = normalization.first;
        t[1] = normalization.second;
        for (std::size_t k = 2; k < n; ++k) t[k] = t[k - 1] + gap0 * std::exp(u(k - 2));
        return t;
    };

    // Three vertices with no vertex at infinity: the triangle is rigid and any
    // third vertex works.
    const bool rigid = (n == 3 && shape.angle_at_infinity() == Rational(1));
    const Eigen::Index unknowns = rigid ? 0 : static_cast<Eigen::Index>(n - 2);

    Eigen::VectorXd u0(unknowns);
    if (unknowns > 0) {
        if (options.initial_vertices) {
            const auto& iv = *options.initial_vertices;
            if (iv.size() != n) throw std::invalid_argument("initial vertex vector has wrong size");
            // Map the guess affinely onto the normalization.
            const double s = gap0 / (iv[1] - iv[0]);
            for (std::size_t k = 2; k < n; ++k) u0(k - 2) = std::log((iv[k] - iv[k - 1]) * s / gap0);
        } else {
            double mean = 0;
            for (double l : target_lengths) mean += std::abs(l);
            mean /= static_cast<double>(n - 1);
            auto weight = [&](std::size_t k) { return std::max(std::abs(target_lengths[k]), 0.1 * mean); };
            for (std::size_t k = 2; k < n; ++k) u0(k - 2) = std::log(weight(k - 1) / weight(0));
        }
    }

    auto lengths_at = [&](const std::vector<double>& t) {
        return signed_edge_lengths(SCData(1.0, t, vertex_data), options.quad_tol);
    };
    auto residual = [&](const Eigen::VectorXd& u) -> std::optional<Eigen::VectorXd> {
        if (!u.allFinite() || u.cwiseAbs().maxCoeff() > 60) return std::nullopt;
        std::vector<double> lens;
        try {
            lens = lengths_at(vertices_from(u));
        } catch (const Error&) {
            return std::nullopt;
        }
        Eigen::VectorXd r(static_cast<Eigen::Index>(n - 2));
        Eigen::Index row = 0;
        for (std::size_t k = 0; k + 1 < n; ++k) {
            if (k == ref) continue;
            if (shape.edge_regularized(k)) {
                r(row++) = lens[k] / lens[ref] - target_lengths[k] / target_lengths[ref];
            } else {
                const double q = lens[k] / lens[ref];
                if (!(q > 0)) return std::nullopt;
                r(row++) = std::log(q) - std::log(target_lengths[k] / target_lengths[ref]);
            }
        }
        if (!r.allFinite()) return std::nullopt;
        return r;
    };

    ParameterSolution out;
    std::vector<double> t;
    double residual_norm = 0;
    if (unknowns == 0) {
        t = {normalization.first, normalization.second, normalization.second + gap0};
    } else {
        lm::Options lo;
        lo.max_iterations = options.max_iterations;
        lo.tol = options.tol;
        lo.fd_step = options.fd_step;
        lm::Result res;
        try {
            res = lm::solve(residual, u0, lo);
        } catch (const std::runtime_error&) {
            throw NoConvergence("parameter problem cannot be evaluated at the initial guess");
        }
        t = vertices_from(res.x);
        residual_norm = res.residual;
        out.iterations = res.iterations;
        if (!res.converged) {
            throw NoConvergence("parameter problem did not converge", t, res.residual);
        }
    }
    const auto lens = lengths_at(t);
    out.sc = SCData(target_lengths[ref] / lens[ref], t, vertex_data);
    out.residual = residual_norm;
    return out;
}

}  // namespace minsurf::scmap
