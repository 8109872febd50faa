#pragma once

#include <string_view>

#include "ctab/table.hpp"

namespace ctab::testfix {

// Two binary evidence variables and one binary conclusion; the running
// example every numeric check in the suite is anchored to.
inline constexpr std::string_view fig1_kb =
    "variable e1 false true\n"
    "variable e2 false true\n"
    "variable c  false true\n"
    "p e1=false e2=false c=false 0.05\n"
    "p e1=false e2=true  c=false 0.10\n"
    "p e1=true  e2=false c=false 0.10\n"
    "p e1=true  e2=true  c=false 0.15\n"
    "p e1=false e2=false c=true  0.20\n"
    "p e1=false e2=true  c=true  0.10\n"
    "p e1=true  e2=false c=true  0.25\n"
    "p e1=true  e2=true  c=true  0.05\n";

inline JointTable fig1() {
  return JointTable({{"e1", {"false", "true"}},
                     {"e2", {"false", "true"}},
                     {"c", {"false", "true"}}},
                    // layout (e1, e2, c), c fastest
                    {0.05, 0.20, 0.10, 0.10, 0.10, 0.25, 0.15, 0.05});
}

// Evidence subtable of fig1 over (e1, e2).
inline JointTable fig2a() {
  return JointTable({{"e1", {"false", "true"}}, {"e2", {"false", "true"}}},
                    {0.25, 0.20, 0.35, 0.20});
}

// Exact fitted (false,false) cell for fig2a under targets e1=(.3,.7),
// e2=(.2,.8): the feasible root of x^2 + 3x - 0.15 = 0.
inline double fig2b_exact_x() { return (-3.0 + std::sqrt(9.6)) / 2.0; }

}  // namespace ctab::testfix
