#pragma once

#include "mfc/geometry.hpp"
#include "oracles.hpp"

namespace oracle {

using mfc::ChartPtr;
using mfc::DiffForm;

inline ChartPtr base_chart(int n, int extra_fiber = 0, const std::string& tag = "t") {
    std::vector<SymbolId> cs;
    for (int i = 0; i < n; ++i) cs.push_back(mfc::base_coord(i));
    for (int a = 0; a < extra_fiber; ++a) cs.push_back(mfc::free_symbol("u_" + tag, {a}));
    return std::make_shared<mfc::Chart>("X", cs, n);
}

inline std::vector<int> random_subset(std::mt19937_64& rng, int n, int k) {
    std::vector<int> all(n);
    for (int i = 0; i < n; ++i) all[i] = i;
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(k);
    return all;
}

inline DiffForm random_form(ExprGen& g, ChartPtr c, int degree, int nterms = 3, int depth = 2) {
    DiffForm f(c, degree);
    if (degree > c->dim()) return f;
    for (int t = 0; t < nterms; ++t)
        f += DiffForm::monomial(c, g.gen(depth), random_subset(g.rng, c->dim(), degree));
    return f;
}

}  // namespace oracle
