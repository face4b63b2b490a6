#pragma once

// Invariant suites run by `check`: each check is an identity of the engine, tested
// symbolically first and numerically (seeded samples) when canonical forms differ.

#include <string>
#include <vector>

#include "mfc/numverify.hpp"
#include "mfc/report.hpp"
#include "mfc/symmetry.hpp"

namespace mfc {

// forms, legendre, noether, bracket, transitivity, all
const std::vector<std::string>& suite_names();

// throws std::invalid_argument for an unknown suite name
std::vector<CheckResult> run_suite(const Theory& t, const std::string& suite, const VerifyPlan& plan);

// exact, else numeric at plan.tol
CheckResult check_equal(const std::string& suite, const std::string& name, const Expr& a, const Expr& b,
                        const VerifyPlan& plan);
CheckResult check_equal(const std::string& suite, const std::string& name, const DiffForm& a, const DiffForm& b,
                        const VerifyPlan& plan);

struct OnShellVerdict {
    bool conserved = false;
    bool exact = false;   // delta_xi L vanishes identically
    std::string detail;
};
// d(current) = 0 on solutions: delta_xi L is zero, or each parameter-monomial coefficient
// of delta_xi L is a constant combination of the Euler-Lagrange expressions
OnShellVerdict on_shell_conservation(const Theory& t, const GeneratorFamily& g, const VerifyPlan& plan);

}  // namespace mfc
