#include "minsurf/angel.hpp"

#include <cmath>

#include "minsurf/lm.hpp"

namespace minsurf::angel {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<cplx> edge_directions(const std::vector<Rational>& a) {
    std::vector<cplx> out;
    for (std::size_t k = 0; k + 1 < a.size(); ++k) {
        double s = 0;
        for (std::size_t i = k + 1; i < a.size(); ++i) s += (a[i] - 1).to_double();
        out.push_back(std::polar(1.0, kPi * s));
    }
    return out;
}

double max_abs(const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// Residual of the conjugacy on the shared vertex set t.
double common_conjugacy(int p, const std::vector<double>& t, double c1, double c2, double tol) {
    return orthodisk::conjugacy_report(geta_orthodisk(p, c1, t), ginveta_orthodisk(p, c2, t), tol)
        .max_residual;
}

}  // namespace

std::vector<std::size_t> AngelVertexData::marked() const {
    std::vector<std::size_t> m;
    for (std::size_t i = 1; i <= marked_count; ++i) m.push_back(i);
    return m;
}

AngelVertexData angel_data(int p) {
    if (p < 1) throw std::invalid_argument("genus must be >= 1");
    AngelVertexData d;
    d.genus = p;
    d.a_geta = {Rational(1), half(1)};
    d.a_ginveta = {Rational(3), half(-1)};
    for (int k = 1; k <= 2 * p; ++k) {
        d.a_geta.push_back(k % 2 == 1 ? half(3) : half(1));
        d.a_ginveta.push_back(k % 2 == 1 ? half(1) : half(3));
    }
    d.marked_count = static_cast<std::size_t>(2 * p + 1);
    return d;
}

std::vector<double> PolygonPair::q1_targets() const {
    std::vector<double> v{base.l_minus1, base.l0};
    v.insert(v.end(), stairs.begin(), stairs.end());
    v.push_back(base.l_last);
    return v;
}

std::vector<double> PolygonPair::q2_targets() const {
    auto v = q1_targets();
    v[0] = base.mu;
    return v;
}

std::vector<double> symmetric_staircase(const std::vector<double>& half_stairs) {
    std::vector<double> out = half_stairs;
    out.insert(out.end(), half_stairs.rbegin(), half_stairs.rend());
    return out;
}

PolygonPair build_polygon_pair(const PairBase& base, const std::vector<double>& stairs) {
    if (stairs.size() % 2 != 0) throw std::invalid_argument("staircase needs an even number of edges");
    if (!(base.l_minus1 > 0 && base.l0 > 0 && base.l_last > 0)) {
        throw std::invalid_argument("base lengths must be positive");
    }
    for (double s : stairs) {
        if (!(s > 0)) throw std::invalid_argument("staircase lengths must be positive");
    }
    PolygonPair pair;
    pair.genus = static_cast<int>(stairs.size() / 2) + 1;
    pair.base = base;
    pair.stairs = stairs;
    const auto data = angel_data(pair.genus);
    const auto d1 = edge_directions(data.a_geta);
    const auto d2 = edge_directions(data.a_ginveta);
    const auto l1 = pair.q1_targets();
    const auto l2 = pair.q2_targets();
    const cplx turn(0.0, -1.0);
    cplx pos = 0;
    pair.q1_vertices.push_back(pos);
    for (std::size_t k = 0; k < l1.size(); ++k) {
        pair.q1_edges.push_back(l1[k] * d1[k]);
        pair.q2_edges.push_back(turn * l2[k] * d2[k]);
        pos += pair.q1_edges.back();
        pair.q1_vertices.push_back(pos);
    }
    return pair;
}

double SolveResult::gauss_constant() const { return std::sqrt(c1 / c2); }

orthodisk::EnhancedOrthodisk geta_orthodisk(int p, double c, const std::vector<double>& t) {
    const auto d = angel_data(p);
    return orthodisk::EnhancedOrthodisk(scmap::SCData(c, t, d.a_geta), d.marked());
}

orthodisk::EnhancedOrthodisk ginveta_orthodisk(int p, double c, const std::vector<double>& t) {
    const auto d = angel_data(p);
    return orthodisk::EnhancedOrthodisk(scmap::SCData(c, t, d.a_ginveta), d.marked());
}

SolveResult solve_genus1(double tol, const SolveOptions& options) {
    auto vertices = [](double t) { return std::vector<double>{-1.0, 0.0, 1.0, t}; };
    auto residual = [&](const Eigen::VectorXd& x) -> std::optional<Eigen::VectorXd> {
        const double c = std::exp(x(0));
        const double t = 1.0 + std::exp(x(1));
        if (!std::isfinite(c) || !std::isfinite(t) || t > 1e6) return std::nullopt;
        try {
            const auto fx = geta_orthodisk(1, c, vertices(t)).lifted_form();
            const auto fy = ginveta_orthodisk(1, 1.0 / c, vertices(t)).lifted_form();
            Eigen::VectorXd r(4);
            int row = 0;
            for (const auto& cyc : hyperell::basis_cycles(fx.curve())) {
                const cplx d = hyperell::period(fx, cyc, options.quad_tol) -
                               std::conj(hyperell::period(fy, cyc, options.quad_tol));
                r(row++) = d.real();
                r(row++) = d.imag();
            }
            return r;
        } catch (const Error&) {
            return std::nullopt;
        }
    };

    SolveResult out;
    lm::Options lo;
    lo.tol = tol;
    lo.max_iterations = options.max_iterations;
    lo.trace = [&](int it, double r, double s) {
        out.trace.push_back({it, r, s});
        if (options.on_iteration) options.on_iteration(out.trace.back());
    };
    Eigen::VectorXd x0(2);
    x0 << std::log(2.0), std::log(0.5);
    const auto res = lm::solve(residual, x0, lo);
    const double c = std::exp(res.x(0));
    const double t = 1.0 + std::exp(res.x(1));
    if (!res.converged) throw NoConvergence("genus-1 period problem did not converge", {c, t}, res.residual);

    out.genus = 1;
    out.t_vector = vertices(t);
    out.s_vector = out.t_vector;
    out.c1 = c;
    out.c2 = 1.0 / c;
    out.iterations = res.iterations;
    out.residual_reflexive = 0.0;
    out.residual_conjugate = common_conjugacy(1, out.t_vector, out.c1, out.c2, options.quad_tol);

    const auto d = angel_data(1);
    const auto l1 = scmap::signed_edge_lengths(scmap::SCData(out.c1, out.t_vector, d.a_geta), options.quad_tol);
    const auto l2 = scmap::signed_edge_lengths(scmap::SCData(out.c2, out.t_vector, d.a_ginveta), options.quad_tol);
    out.pair = build_polygon_pair(PairBase{l1[0], l1[1], l1[2], l2[0]}, {});
    return out;
}

MismatchEvaluation reflexive_mismatch(const PolygonPair& pair,
                                      const std::optional<std::vector<double>>& q1_guess,
                                      const std::optional<std::vector<double>>& q2_guess,
                                      const SolveOptions& options) {
    const auto data = angel_data(pair.genus);
    scmap::ParameterOptions po;
    po.tol = options.inner_tol;
    po.quad_tol = options.quad_tol;
    po.initial_vertices = q1_guess;
    const auto s1 = scmap::solve_parameter_problem(data.a_geta, pair.q1_targets(), {}, po);
    po.initial_vertices = q2_guess;
    const auto s2 = scmap::solve_parameter_problem(data.a_ginveta, pair.q2_targets(), {}, po);
    const auto a = orthodisk::normalized_vertices(s1.sc.vertices);
    const auto b = orthodisk::normalized_vertices(s2.sc.vertices);
    MismatchEvaluation ev{{}, s1.sc, s2.sc};
    for (std::size_t i = 1; i + 1 < a.size(); ++i) ev.mismatch.push_back(a[i] - b[i]);
    return ev;
}

std::vector<double> continuation_guess(const std::vector<double>& previous) {
    // One more block of roughly the size of the first handle, appended at the
    // Enneper side: observed solutions add vertices about 2.7 and 3.7 units of
    // the first gap beyond the last one.
    const double unit = previous[2] - previous[1];
    std::vector<double> t = previous;
    t.push_back(previous.back() + 2.7 * unit);
    t.push_back(t.back() + 1.0 * unit);
    return t;
}

SolveResult solve_genus_p(int p, const std::optional<SolveResult>& seed, double tol,
                          const SolveOptions& options) {
    if (p < 2) throw std::invalid_argument("continuation solve needs genus >= 2");
    SolveResult prev;
    if (seed) {
        prev = *seed;
    } else {
        prev = solve_genus1(1e-12, options);
    }
    if (prev.genus > p - 1) throw std::invalid_argument("seed genus too large");
    while (prev.genus < p - 1) prev = solve_genus_p(prev.genus + 1, prev, tol, options);

    const auto data = angel_data(p);
    const double l_last = prev.pair.base.l_last;

    // Seed the pair from the forward image of the continuation guess.
    const auto t_guess = continuation_guess(prev.t_vector);
    const auto f1 = scmap::signed_edge_lengths(scmap::SCData(1.0, t_guess, data.a_geta), options.quad_tol);
    const auto f2 = scmap::signed_edge_lengths(scmap::SCData(1.0, t_guess, data.a_ginveta), options.quad_tol);
    const double k1 = l_last / f1.back();
    const double k2 = l_last / f2.back();
    const Eigen::Index n = 2 * p + 1;
    Eigen::VectorXd x0(n);
    x0(0) = std::log(k1 * f1[0]);
    x0(1) = std::log(k1 * f1[1]);
    for (int k = 0; k < 2 * p - 2; ++k) x0(2 + k) = std::log(k1 * f1[static_cast<std::size_t>(2 + k)]);
    x0(n - 1) = k2 * f2[0] / l_last;

    auto pair_of = [&](const Eigen::VectorXd& x) {
        PairBase base{std::exp(x(0)), std::exp(x(1)), l_last, x(n - 1) * l_last};
        std::vector<double> stairs;
        for (int k = 0; k < 2 * p - 2; ++k) stairs.push_back(std::exp(x(2 + k)));
        return build_polygon_pair(base, stairs);
    };

    std::vector<double> warm1 = t_guess, warm2 = t_guess;
    auto residual = [&](const Eigen::VectorXd& x) -> std::optional<Eigen::VectorXd> {
        if (!x.allFinite() || x.head(n - 1).cwiseAbs().maxCoeff() > 30) return std::nullopt;
        try {
            const auto ev = reflexive_mismatch(pair_of(x), warm1, warm2, options);
            Eigen::VectorXd r(n);
            for (std::size_t i = 0; i < ev.mismatch.size(); ++i) r(static_cast<Eigen::Index>(i)) = ev.mismatch[i];
            r(n - 1) = ev.q1.vertices[2] - 1.0;
            warm1 = ev.q1.vertices;
            warm2 = ev.q2.vertices;
            return r;
        } catch (const Error&) {
            return std::nullopt;
        }
    };

    SolveResult out;
    lm::Options lo;
    lo.tol = tol;
    lo.max_iterations = options.max_iterations;
    lo.max_step = 0.5;
    lo.trace = [&](int it, double r, double s) {
        out.trace.push_back({it, r, s});
        if (options.on_iteration) options.on_iteration(out.trace.back());
    };
    const auto res = lm::solve(residual, x0, lo);
    std::vector<double> best(res.x.data(), res.x.data() + res.x.size());
    if (!res.converged) {
        throw NoConvergence("reflexive pair of genus " + std::to_string(p) + " not found", best,
                            res.residual);
    }

    out.pair = pair_of(res.x);
    const auto ev = reflexive_mismatch(out.pair, warm1, warm2, options);
    out.genus = p;
    out.t_vector = ev.q1.vertices;
    out.s_vector = ev.q2.vertices;
    out.c1 = ev.q1.scale;
    out.c2 = ev.q2.scale;
    out.iterations = res.iterations;
    out.residual_reflexive = max_abs(ev.mismatch);
    out.residual_conjugate = common_conjugacy(p, out.t_vector, out.c1, out.c2, options.quad_tol);
    return out;
}

double height_value(const std::vector<std::pair<double, double>>& ext_pairs) {
    double h = 0;
    for (const auto& [e1, e2] : ext_pairs) {
        if (!(e1 > 0) || !(e2 > 0)) throw DomainError("extremal lengths must be positive");
        const double a = std::exp(e1) - std::exp(e2);
        const double b = std::exp(1.0 / e1) - std::exp(1.0 / e2);
        h += a * a + b * b;
    }
    return h;
}

}  // namespace minsurf::angel
