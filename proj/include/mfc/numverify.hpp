#pragma once

// Numeric oracles: seeded sampling, identity checks at sample points, and central
// finite differences against symbolic derivatives.

#include <cstdint>
#include <string>

#include "mfc/geometry.hpp"

namespace mfc {

struct VerifyPlan {
    int n_samples = 20;
    double tol = 1e-9;
    std::uint64_t seed = 1;
};

struct VerifyReport {
    bool passed = false;
    bool skipped = false;       // finite differences: expression involves undetermined function symbols
    int samples = 0;
    double max_deviation = 0;   // relative, |a - b| / (1 + |a| + |b|)
    int worst_sample = -1;
    double lhs_at_worst = 0, rhs_at_worst = 0;
    std::string detail;
};

// every chart coordinate (and the derived metric symbols they need) bound
Assignment sample_point(const Chart& chart, std::uint64_t seed);

VerifyReport verify_identity(const Expr& lhs, const Expr& rhs, const VerifyPlan& plan);

// diff(expr, s) against (f(s + h) - f(s - h)) / 2h, relative error |sym - fd| / max(1, |sym|)
VerifyReport finite_difference_check(const Expr& expr, SymbolId s, const VerifyPlan& plan, double h = 1e-5);

}  // namespace mfc
