// One PASS/FAIL line per acceptance criterion, each with the measured values.
// Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "minsurf/angel.hpp"
#include "minsurf/cli.hpp"
#include "minsurf/surface.hpp"
#include "oracle.hpp"

using namespace minsurf;
using cplx = std::complex<double>;

namespace {

int failures = 0;

void report(int n, const char* what, bool ok, const std::string& detail) {
    std::printf("%s criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", n, what, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::vector<oracle::Power> powers(const quad::SingularFactorization& f) {
    std::vector<oracle::Power> out;
    for (std::size_t i = 0; i < f.size(); ++i) {
        out.push_back({f.points()[i], static_cast<int>(f.exponents()[i].num()),
                       static_cast<int>(f.exponents()[i].den())});
    }
    return out;
}

double relative(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// Every call to a library routine that may throw is wrapped so a failing
// criterion prints its line instead of aborting the run.
template <class F>
void guarded(int n, const char* what, F&& body) {
    try {
        body();
    } catch (const std::exception& e) {
        report(n, what, false, std::string("exception: ") + e.what());
    }
}

void quadrature(std::mt19937_64& g) {
    guarded(1, "quadrature agrees with the Gauss-Kronrod substitution oracle", [&] {
        Stopwatch sw;
        double worst = 0;
        using quad::SingularFactorization;
        auto check = [&](const SingularFactorization& f, double a, double b) {
            worst = std::max(worst, relative(quad::integrate_segment(f, a, b),
                                             oracle::segment(powers(f), a, b, f.prefactor())));
        };
        check(SingularFactorization({0.0}, {half(-1)}), 0, 1);
        check(SingularFactorization({0.0, 1.0}, {half(-1), half(1)}), 0, 1);
        check(SingularFactorization({-1.0, 0.0, 1.0, 2.0}, {0, half(-1), half(1), half(-1)}), 1, 2);
        const std::vector<Rational> exps = {Rational(-3, 4), half(-1), Rational(-1, 3), Rational(1, 3),
                                            half(1),         half(3),  Rational(2, 3), 0, 1};
        std::uniform_int_distribution<int> count(2, 5), pick(0, static_cast<int>(exps.size()) - 1);
        std::uniform_real_distribution<double> gap(0.2, 2.0), scale(0.5, 3.0);
        for (int trial = 0; trial < 20; ++trial) {
            const int n = count(g);
            std::vector<double> pts;
            std::vector<Rational> ex;
            double x = -1.0;
            for (int i = 0; i < n; ++i) {
                x += gap(g);
                pts.push_back(x);
                ex.push_back(exps[pick(g)]);
            }
            const int k = trial % (n - 1);
            check(SingularFactorization(pts, ex, scale(g)), pts[k], pts[k + 1]);
        }
        const double t = sw.seconds();
        report(1, "quadrature agrees with the Gauss-Kronrod substitution oracle", worst < 1e-10 && t < 5.0,
               fmt("23 integrals, max relative error %.2e, %.2f s", worst, t));
    });
}

void parameter_round_trip(std::mt19937_64& g) {
    guarded(2, "parameter problem round trip and rectangle modulus", [&] {
        double worst = 0;
        std::uniform_int_distribution<int> size(4, 8);
        std::uniform_real_distribution<double> len(0.5, 2.0);
        for (int trial = 0; trial < 10; ++trial) {
            const int n = size(g);
            const int first = static_cast<int>(g() % 2);
            std::vector<Rational> a;
            for (int i = 0; i < n; ++i) a.push_back((i + first) % 2 == 0 ? half(1) : half(3));
            std::vector<double> lengths(n - 1);
            for (auto& l : lengths) l = len(g);
            const auto sol = scmap::solve_parameter_problem(a, lengths);
            const auto img = scmap::polygon_image(sol.sc);
            const double l0 = std::abs(img.edge_vectors[0]);
            for (int k = 0; k < n - 1; ++k) {
                worst = std::max(worst, std::abs(std::abs(img.edge_vectors[k]) / l0 * lengths[0] / lengths[k] - 1));
            }
        }
        double modulus = 0;
        for (double r : {0.5, 1.0, 2.0}) {
            const auto sol = scmap::solve_parameter_problem(std::vector<Rational>(4, half(1)), {1.0, r, 1.0});
            const auto& t = sol.sc.vertices;
            modulus = std::max(modulus, std::abs(oracle::rectangle_ratio(t[0], t[1], t[2], t[3]) / r - 1));
        }
        report(2, "parameter problem round trip and rectangle modulus", worst < 1e-8 && modulus < 1e-8,
               fmt("10 polygons max ratio error %.2e, rectangle modulus error %.2e", worst, modulus));
    });
}

// Orders per vertex and at infinity.
std::vector<int> orders(const orthodisk::DivisorTable& d, std::size_t n) {
    std::vector<int> out(n + 1, 0);
    for (const auto& e : d.entries) out[e.at_infinity ? n : e.vertex] = e.order;
    return out;
}

void genus1(angel::SolveResult& g1) {
    guarded(3, "genus-1 solve with direct period verification and divisor table", [&] {
        Stopwatch sw;
        g1 = angel::solve_genus1();
        const double t = g1.t_vector.back();
        const auto wd = surface::assemble(g1);
        const auto rep = surface::verify_periods(wd);
        const auto x = angel::geta_orthodisk(1, g1.c1, g1.t_vector);
        const auto y = angel::ginveta_orthodisk(1, g1.c2, g1.s_vector);
        const bool table = orders(orthodisk::divisor(x), 4) == std::vector<int>{0, 0, 2, 0, -2} &&
                           orders(orthodisk::divisor(y), 4) == std::vector<int>{2, -2, 0, 2, -4};
        const double secs = sw.seconds();
        const bool ok = g1.gauss_constant() > 0 && t > 1 && rep.max_residual < 1e-7 && rep.labels.size() == 8 &&
                        table && secs < 60;
        report(3, "genus-1 solve with direct period verification and divisor table", ok,
               fmt("t = %.12f, c = %.12f, max period residual %.2e", t, g1.gauss_constant(), rep.max_residual) +
                   (table ? ", divisor table exact" : ", divisor table MISMATCH") + fmt(", %.2f s", secs));
    });
}

void conjugacy_by_construction(const angel::SolveResult& g1, std::mt19937_64& g) {
    guarded(4, "conjugacy of A_j (j >= 1) and B_j for arbitrary staircases", [&] {
        std::uniform_real_distribution<double> len(0.3, 2.0);
        double worst = 0;
        int pairs = 0;
        for (int p = 2; p <= 3; ++p) {
            const auto marked = angel::angel_data(p).marked();
            for (int trial = 0; trial < 5; ++trial) {
                std::vector<double> stairs(2 * p - 2);
                for (auto& s : stairs) s = len(g);
                const auto ev = angel::reflexive_mismatch(angel::build_polygon_pair(g1.pair.base, stairs));
                const auto rep = orthodisk::conjugacy_report(orthodisk::EnhancedOrthodisk(ev.q1, marked),
                                                             orthodisk::EnhancedOrthodisk(ev.q2, marked));
                for (std::size_t i = 0; i < rep.labels.size(); ++i) {
                    const auto& l = rep.labels[i];
                    if (l[0] == 'B' || (l[0] == 'A' && l != "A0")) worst = std::max(worst, rep.residuals[i]);
                }
                ++pairs;
            }
        }
        report(4, "conjugacy of A_j (j >= 1) and B_j for arbitrary staircases", worst < 1e-6,
               fmt("%g pairs, max residual %.2e", pairs, worst));
    });
}

void higher_genus(const angel::SolveResult& g1, std::vector<angel::SolveResult>& solved) {
    guarded(5, "genus-2 and genus-3 reflexive solves", [&] {
        bool ok = true;
        std::string detail;
        std::optional<angel::SolveResult> seed = g1;
        for (int p = 2; p <= 3; ++p) {
            Stopwatch sw;
            auto r = angel::solve_genus_p(p, seed);
            const auto ev = angel::reflexive_mismatch(r.pair);
            double mismatch = 0;
            for (double v : ev.mismatch) mismatch = std::max(mismatch, std::abs(v));
            const auto wd = surface::assemble(r);
            const auto rep = surface::verify_periods(wd);
            const auto ends = surface::classify_ends(wd).ends;
            const bool ends_ok = ends.size() == 2 && ends[0].type == surface::EndType::Catenoid &&
                                 !ends[0].puncture.at_infinity && ends[0].puncture.z == 0.0 &&
                                 ends[1].type == surface::EndType::Enneper && ends[1].puncture.at_infinity;
            const double secs = sw.seconds();
            ok = ok && mismatch < 1e-6 && rep.max_residual < 1e-6 && ends_ok && secs < 1200;
            detail += fmt("genus %g: mismatch %.2e, period residual %.2e", p, mismatch, rep.max_residual) +
                      (ends_ok ? ", catenoid at 0 and Enneper at infinity" : ", WRONG ends") + fmt(", %.2f s; ", secs);
            seed = r;
            solved.push_back(std::move(r));
        }
        detail.resize(detail.size() - 2);
        report(5, "genus-2 and genus-3 reflexive solves", ok, detail);
    });
}

void eta_identity(std::mt19937_64& g) {
    guarded(6, "omega_1 omega_2 = eta^2 pointwise and eta = (z+1)/z dz for every genus", [&] {
        std::uniform_real_distribution<double> re(-3.0, 12.0), im(0.01, 4.0), gap(0.3, 2.0), scale(0.3, 3.0);
        double worst = 0;
        for (int p = 1; p <= 3; ++p) {
            std::vector<double> t = {-1.0, 0.0};
            for (int k = 0; k < 2 * p; ++k) t.push_back(t.back() + gap(g));
            const auto x = angel::geta_orthodisk(p, scale(g), t);
            const auto y = angel::ginveta_orthodisk(p, scale(g), t);
            const auto eta = orthodisk::build_eta(x, y);
            for (int k = 0; k < 100; ++k) {
                const cplx z(re(g), im(g));
                const cplx e = quad::evaluate(eta, z);
                const cplx prod = quad::evaluate(x.sc().integrand(), z) * quad::evaluate(y.sc().integrand(), z);
                worst = std::max(worst, std::abs(prod / (e * e) - 1.0));
            }
        }
        bool exponents = true;
        for (int p = 1; p <= 10; ++p) {
            const auto d = angel::angel_data(p);
            std::vector<double> t = {-1.0, 0.0};
            for (int k = 0; k < 2 * p; ++k) t.push_back(k + 1.0);
            const auto eta = orthodisk::build_eta(angel::geta_orthodisk(p, 1.0, t), angel::ginveta_orthodisk(p, 1.0, t));
            for (std::size_t j = 0; j < t.size(); ++j) {
                const Rational want = j == 0 ? Rational(1) : j == 1 ? Rational(-1) : Rational(0);
                exponents = exponents && eta.exponents()[j] == want &&
                            (d.a_geta[j] + d.a_ginveta[j]) / Rational(2) - Rational(1) == want;
            }
        }
        report(6, "omega_1 omega_2 = eta^2 pointwise and eta = (z+1)/z dz for every genus",
               worst < 1e-10 && exponents,
               fmt("300 points, max relative error %.2e", worst) +
                   (exponents ? ", exponents (1, -1, 0, ...) for genus 1..10" : ", exponent MISMATCH"));
    });
}

void immersion(const angel::SolveResult& g1, const std::vector<angel::SolveResult>& solved) {
    guarded(7, "immersion closed forms, period leak and total curvature", [&] {
        using namespace surface;
        const cplx I(0, 1);
        WeierstrassData en;
        en.gauss = {1.0, {0.0}, {1}};
        en.eta = {2.0, {0.0}, {1}};
        en.punctures = {hyperell::Puncture::infinity()};
        MeshOptions oe;
        oe.r_min = 0.05;
        oe.r_max = 3.0;
        const auto me = immerse(en, oe);
        auto enneper = [&](cplx z) {
            const cplx z3 = z * z * z;
            return Vec3{(z - z3 / 3.0).real(), (I * (z + z3 / 3.0)).real(), (z * z).real()};
        };
        double e_err = 0;
        const Vec3 eb = enneper(me.z[me.root]);
        for (std::size_t v = 0; v < me.positions.size(); ++v) {
            const Vec3 x = enneper(me.z[v]);
            for (int i = 0; i < 3; ++i) e_err = std::max(e_err, std::abs(me.positions[v][i] - (x[i] - eb[i])));
        }

        WeierstrassData ca;
        ca.gauss = {1.0, {0.0}, {1}};
        ca.eta = {1.0, {0.0}, {-1}};
        ca.punctures = {hyperell::Puncture::at(0.0), hyperell::Puncture::infinity()};
        MeshOptions oc;
        oc.r_min = 1e-3;
        oc.r_max = 1e3;
        const auto mc = immerse(ca, oc);
        auto catenoid = [&](cplx z) {
            return Vec3{(-0.5 * (1.0 / z + z)).real(), (0.5 * I * (z - 1.0 / z)).real(), std::log(std::abs(z))};
        };
        double c_err = 0;
        const Vec3 cb = catenoid(mc.z[mc.root]);
        for (const auto& p : mc.positions) {
            const double x = p[0] + cb[0], y = p[1] + cb[1], z = p[2] + cb[2];
            c_err = std::max(c_err, std::abs(std::sqrt(x * x + y * y) / std::cosh(z) - 1.0));
        }

        bool ok = e_err < 1e-10 && c_err < 1e-8;
        std::string detail = fmt("Enneper error %.2e, catenoid cosh residual %.2e", e_err, c_err);
        std::vector<const angel::SolveResult*> targets = {&g1};
        if (!solved.empty()) targets.push_back(&solved[0]);
        for (const auto* r : targets) {
            const auto wd = assemble(*r);
            const auto m = immerse(wd);
            const auto d = diagnostics(wd, m);
            ok = ok && m.period_leak < 1e-5 && d.curvature_relative_error < 0.02;
            detail += fmt("; genus %g: leak %.2e, curvature %.4f", r->genus, m.period_leak, d.total_curvature) +
                      fmt(" vs %.4f (deg G = %g", d.expected_curvature, d.gauss_degree) +
                      fmt(", %.2f%%)", 100 * d.curvature_relative_error);
        }
        if (solved.empty()) {
            ok = false;
            detail += "; genus-2 solution unavailable";
        }
        report(7, "immersion closed forms, period leak and total curvature", ok, detail);
    });
}

void real_eta(const angel::SolveResult& g1, const std::vector<angel::SolveResult>& solved) {
    guarded(8, "Re of eta periods vanishes on every basis cycle", [&] {
        double worst = 0;
        std::vector<const angel::SolveResult*> all = {&g1};
        for (const auto& r : solved) all.push_back(&r);
        for (const auto* r : all) {
            const auto rep = surface::verify_periods(surface::assemble(*r));
            for (std::size_t i = 0; i < rep.labels.size(); ++i) {
                const auto& l = rep.labels[i];
                if (l.find(":re_eta") != std::string::npos && l.rfind("end:", 0) != 0) {
                    worst = std::max(worst, rep.residuals[i]);
                }
            }
        }
        report(8, "Re of eta periods vanishes on every basis cycle", worst < 1e-8 && solved.size() == 2,
               fmt("genus 1..%g, max |Re| %.2e", static_cast<double>(all.size()), worst));
    });
}

void determinism() {
    guarded(9, "repeated genus-2 solve writes identical solution JSON", [&] {
        namespace fs = std::filesystem;
        const auto root = fs::temp_directory_path() / "minsurf_acceptance";
        std::vector<std::string> files;
        for (int run = 0; run < 3; ++run) {
            const auto dir = root / std::to_string(run);
            fs::remove_all(dir);
            fs::create_directories(dir);
            cli::RunConfig c;
            c.genus = 2;
            c.out_dir = dir.string();
            const auto o = cli::cmd_solve(c);
            if (o.exit_code != cli::kSuccess) throw std::runtime_error("solve exit code " + std::to_string(o.exit_code));
            std::ifstream in(dir / "solution-genus2.json", std::ios::binary);
            std::stringstream ss;
            ss << in.rdbuf();
            files.push_back(ss.str());
        }
        fs::remove_all(root);
        const bool same = files[0] == files[1] && files[1] == files[2] && !files[0].empty();
        report(9, "repeated genus-2 solve writes identical solution JSON", same,
               fmt("3 runs, %g bytes each", static_cast<double>(files[0].size())));
    });
}

}  // namespace

int main() {
    std::mt19937_64 g(7);
    quadrature(g);
    parameter_round_trip(g);
    angel::SolveResult g1;
    genus1(g1);
    std::vector<angel::SolveResult> solved;
    if (!g1.t_vector.empty()) {
        conjugacy_by_construction(g1, g);
        higher_genus(g1, solved);
    } else {
        report(4, "conjugacy of A_j (j >= 1) and B_j for arbitrary staircases", false, "no genus-1 solution");
        report(5, "genus-2 and genus-3 reflexive solves", false, "no genus-1 solution");
    }
    eta_identity(g);
    if (!g1.t_vector.empty()) {
        immersion(g1, solved);
        real_eta(g1, solved);
    } else {
        report(7, "immersion closed forms, period leak and total curvature", false, "no genus-1 solution");
        report(8, "Re of eta periods vanishes on every basis cycle", false, "no genus-1 solution");
    }
    determinism();
    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
