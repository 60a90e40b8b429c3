#pragma once

#include <random>

#include "minsurf/angel.hpp"

namespace fixtures {

// Reference values of the genus-1 solve, computed separately at 30 digits
// from the A- and B-cycle balance c^2 = J2/J1 = I2/I1.
constexpr double kGenus1T = 1.54519100947762353597;
constexpr double kGenus1C = 2.11842375978534415703;

inline const minsurf::angel::SolveResult& genus1() {
    static const auto r = minsurf::angel::solve_genus1();
    return r;
}

inline const minsurf::angel::SolveResult& genus2() {
    static const auto r = minsurf::angel::solve_genus_p(2, genus1());
    return r;
}

inline const minsurf::angel::SolveResult& genus3() {
    static const auto r = minsurf::angel::solve_genus_p(3, genus2());
    return r;
}

inline std::mt19937_64& rng() {
    static std::mt19937_64 g(20240611);
    return g;
}

}  // namespace fixtures
