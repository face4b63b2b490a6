#include <algorithm>
#include <numeric>
#include <set>

#include "mfc/expr.hpp"

namespace mfc {

namespace {

Expr det_poly(const std::string& g, int n, std::vector<int> rows, std::vector<int> cols) {
    if (rows.empty()) return Expr(1);
    if (rows.size() == 1) return Expr::sym(metric_symbol(g, rows[0], cols[0]));
    Expr d;
    int r0 = rows[0];
    std::vector<int> rr(rows.begin() + 1, rows.end());
    for (std::size_t j = 0; j < cols.size(); ++j) {
        std::vector<int> cc = cols;
        cc.erase(cc.begin() + j);
        Expr minor = det_poly(g, n, rr, cc) * Expr::sym(metric_symbol(g, r0, cols[j]));
        d += j % 2 ? -minor : minor;
    }
    return d;
}

struct Family {
    std::string name;
    int dim;
    int sign;  // |det| = sign * det
    Expr det;
    std::vector<std::vector<Expr>> adj;
};

Family make_family(const MetricFamily& m) {
    Family f{m.name, m.dim, m.negatives % 2 ? -1 : 1, {}, {}};
    std::vector<int> all(m.dim);
    std::iota(all.begin(), all.end(), 0);
    f.det = det_poly(m.name, m.dim, all, all);
    f.adj.assign(m.dim, std::vector<Expr>(m.dim));
    for (int mu = 0; mu < m.dim; ++mu)
        for (int nu = 0; nu < m.dim; ++nu) {
            std::vector<int> rows, cols;
            for (int i = 0; i < m.dim; ++i) {
                if (i != nu) rows.push_back(i);
                if (i != mu) cols.push_back(i);
            }
            Expr c = det_poly(m.name, m.dim, rows, cols);
            f.adj[mu][nu] = (mu + nu) % 2 ? -c : c;
        }
    return f;
}

// Multiplies through by det^K and splits off sqrt|det|; false when over budget or
// the expression is outside the supported shape.
bool eliminate(const Expr& e, const Family& f, std::size_t budget, Expr& n0, Expr& n1) {
    SymbolId sd = sqrt_neg_det_symbol(f.name);
    struct Piece {
        Expr num;
        int k;
        int r;
    };
    std::vector<Piece> pieces;
    int K = 0;
    std::size_t cost = 0;
    for (auto& t : e.terms()) {
        Monomial rest;
        Expr num(t.c);
        int k = 0, r = 0;
        for (auto& [a, x] : t.m) {
            if (a == sd) {
                int q = x >= 0 ? x / 2 : -((-x + 1) / 2);
                r = x - 2 * q;
                if (q >= 0)
                    num = num * pow(scale(f.det, Rational(f.sign)), q);
                else {
                    num = scale(num, Rational(f.sign % 2 && (-q) % 2 ? -1 : 1));
                    k += -q;
                }
                continue;
            }
            if (!is_sqrt_atom(a) && desc(a).rule == Rule::InverseMetric && desc(a).metric == f.name) {
                if (x < 0) return false;
                const SymbolDesc& d = desc(a);
                num = num * pow(f.adj[d.comp[0]][d.comp[1]], x);
                k += x;
                cost += num.size();
                if (cost > budget) return false;
                continue;
            }
            rest.emplace_back(a, x);
        }
        num = num * Expr::from_terms({Term{Rational(1), std::move(rest)}});
        K = std::max(K, k);
        pieces.push_back({num, k, r});
    }
    std::vector<Expr> p0, p1;
    for (auto& p : pieces) {
        Expr v = p.num * pow(f.det, K - p.k);
        cost += v.size();
        if (cost > budget) return false;
        (p.r ? p1 : p0).push_back(v);
    }
    n0 = sum(p0);
    n1 = sum(p1);
    return true;
}

bool zero_by_elimination(const Expr& e, std::vector<std::string> fams, std::size_t budget) {
    if (e.is_zero()) return true;
    if (fams.empty()) return false;
    const MetricFamily* m = find_metric(fams.back());
    fams.pop_back();
    Family f = make_family(*m);
    Expr n0, n1;
    if (!eliminate(e, f, budget, n0, n1)) return false;
    return zero_by_elimination(n0, fams, budget) && zero_by_elimination(n1, fams, budget);
}

}  // namespace

bool metric_zero_test(const Expr& e, std::size_t budget) {
    if (e.is_zero()) return true;
    std::set<std::string> fams;
    for (SymbolId a : atoms_of(e)) {
        if (is_sqrt_atom(a)) continue;
        const SymbolDesc& d = desc(a);
        if (d.rule == Rule::InverseMetric || d.rule == Rule::SqrtNegDet) fams.insert(d.metric);
    }
    if (fams.empty()) return false;
    return zero_by_elimination(e, {fams.begin(), fams.end()}, budget);
}

}  // namespace mfc
