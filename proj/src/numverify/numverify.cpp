#include "mfc/numverify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mfc {

Assignment sample_point(const Chart& chart, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return sample_assignment({}, rng, chart.coords());
}

namespace {

void require_plan(const VerifyPlan& plan) {
    if (plan.n_samples < 1) throw std::invalid_argument("a verification plan needs n_samples >= 1");
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << x;
    return os.str();
}

}  // namespace

VerifyReport verify_identity(const Expr& lhs, const Expr& rhs, const VerifyPlan& plan) {
    require_plan(plan);
    VerifyReport r;
    std::mt19937_64 rng(plan.seed);
    for (int i = 0; i < plan.n_samples; ++i) {
        Assignment a = sample_assignment({lhs, rhs}, rng);
        double x = eval_numeric(lhs, a), y = eval_numeric(rhs, a);
        double dev = std::abs(x - y) / (1 + std::abs(x) + std::abs(y));
        if (!std::isfinite(dev)) dev = INFINITY;
        if (r.worst_sample < 0 || dev > r.max_deviation) {
            r.max_deviation = dev;
            r.worst_sample = i;
            r.lhs_at_worst = x;
            r.rhs_at_worst = y;
        }
        ++r.samples;
    }
    r.passed = r.max_deviation <= plan.tol;
    r.detail = "max deviation " + fmt(r.max_deviation) + " at sample " + std::to_string(r.worst_sample) + " (lhs " +
               fmt(r.lhs_at_worst) + ", rhs " + fmt(r.rhs_at_worst) + "), tol " + fmt(plan.tol);
    return r;
}

VerifyReport finite_difference_check(const Expr& expr, SymbolId s, const VerifyPlan& plan, double h) {
    require_plan(plan);
    VerifyReport r;
    // function symbols are sampled independently of their argument derivatives, so no
    // difference quotient can see them
    for (SymbolId a : atoms_of(expr)) {
        const SymbolDesc& d = desc(a);
        if (!is_sqrt_atom(a) && d.rule == Rule::Function) {
            const auto& lv = leaves(a);
            if (std::find(lv.begin(), lv.end(), s) != lv.end() || a == s) {
                r.skipped = r.passed = true;
                r.detail = "skipped: depends on " + display_name(s) + " through function symbol " + display_name(a);
                return r;
            }
        }
    }
    Expr sym = diff(expr, s);
    std::mt19937_64 rng(plan.seed);
    for (int i = 0; i < plan.n_samples; ++i) {
        Assignment a = sample_assignment({expr, sym}, rng, {s});
        const double x0 = a.get(s);
        auto at = [&](double x) {
            Assignment b = a;
            b.set(s, x);
            b.refresh_metrics();
            return eval_numeric(expr, b);
        };
        double fd = (at(x0 + h) - at(x0 - h)) / (2 * h);
        double sv = eval_numeric(sym, a);
        double dev = std::abs(sv - fd) / std::max(1.0, std::abs(sv));
        if (!std::isfinite(dev)) dev = INFINITY;
        if (r.worst_sample < 0 || dev > r.max_deviation) {
            r.max_deviation = dev;
            r.worst_sample = i;
            r.lhs_at_worst = sv;
            r.rhs_at_worst = fd;
        }
        ++r.samples;
    }
    r.passed = r.max_deviation <= plan.tol;
    r.detail = "d/d" + display_name(s) + ": max relative error " + fmt(r.max_deviation) + " (symbolic " +
               fmt(r.lhs_at_worst) + ", difference quotient " + fmt(r.rhs_at_worst) + "), tol " + fmt(plan.tol);
    return r;
}

}  // namespace mfc
