#include <algorithm>

#include "mfc/expr.hpp"

namespace mfc {

Expr atom_partial(SymbolId a, SymbolId leaf) {
    const AtomInfo& info = atom(a);
    if (info.is_sqrt) throw std::logic_error("atom_partial on sqrt atom");
    const SymbolDesc& d = info.d;
    if (d.rule == Rule::None) return a == leaf ? Expr(1) : Expr();
    if (!std::binary_search(info.leaves.begin(), info.leaves.end(), leaf)) return Expr();
    if (d.rule == Rule::Function) {
        Expr r;
        for (std::size_t i = 0; i < d.args.size(); ++i)
            if (d.args[i] == leaf) r += Expr::sym(function_derivative(a, int(i)));
        return r;
    }
    const SymbolDesc& ld = desc(leaf);
    int al = ld.comp[0], be = ld.comp[1];
    const std::string& g = d.metric;
    auto gi = [&](int x, int y) { return Expr::sym(inverse_metric_symbol(g, x, y)); };
    if (d.rule == Rule::InverseMetric) {
        int mu = d.comp[0], nu = d.comp[1];
        if (al == be) return -(gi(mu, al) * gi(nu, al));
        return -(gi(mu, al) * gi(nu, be) + gi(mu, be) * gi(nu, al));
    }
    // Rule::SqrtNegDet
    Expr s = Expr::sym(a);
    if (al == be) return scale(s * gi(al, al), Rational(1, 2));
    return s * gi(al, be);
}

Expr apply_derivation(const Expr& e, const std::function<Expr(SymbolId)>& delta_leaf) {
    std::unordered_map<SymbolId, Expr> cache;
    std::function<const Expr&(SymbolId)> delta_atom = [&](SymbolId a) -> const Expr& {
        auto it = cache.find(a);
        if (it != cache.end()) return it->second;
        const AtomInfo& info = atom(a);
        Expr r;
        if (info.is_sqrt) {
            // d sqrt(R) = 1/2 sqrt(R)^-1 dR, expressed per unit exponent by the caller
            r = apply_derivation(*info.radicand, delta_leaf);
        } else if (info.d.rule == Rule::None) {
            r = delta_leaf(a);
        } else {
            for (SymbolId l : info.leaves) {
                Expr dl = delta_leaf(l);
                if (!dl.is_zero()) r += atom_partial(a, l) * dl;
            }
        }
        return cache.emplace(a, std::move(r)).first->second;
    };
    std::vector<Expr> parts;
    for (auto& t : e.terms()) {
        for (std::size_t i = 0; i < t.m.size(); ++i) {
            auto [a, k] = t.m[i];
            const Expr& da = delta_atom(a);
            if (da.is_zero()) continue;
            Monomial m = t.m;
            Rational c = t.c;
            if (is_sqrt_atom(a)) {
                // d R^(k/2) = k/2 R^((k-2)/2) dR
                c *= Rational(k, 2);
                m[i].second -= 2;
            } else {
                c *= Rational(k);
                m[i].second -= 1;
            }
            if (m[i].second == 0) m.erase(m.begin() + i);
            parts.push_back(Expr::from_terms({Term{c, std::move(m)}}) * da);
        }
    }
    return sum(parts);
}

Expr diff(const Expr& e, SymbolId s) {
    if (is_sqrt_atom(s) || desc(s).rule != Rule::None)
        throw UnknownSymbol("diff target must be a leaf symbol: " + display_name(s));
    std::vector<Term> hit;
    for (auto& t : e.terms()) {
        for (auto& f : t.m) {
            auto& l = leaves(f.first);
            if (f.first == s || std::binary_search(l.begin(), l.end(), s)) {
                hit.push_back(t);
                break;
            }
        }
    }
    if (hit.empty()) return Expr();
    return apply_derivation(Expr::from_terms(std::move(hit)),
                            [s](SymbolId l) { return l == s ? Expr(1) : Expr(); });
}

Expr substitute(const Expr& e, const std::unordered_map<SymbolId, Expr>& bindings) {
    if (bindings.empty()) return e;
    std::unordered_map<SymbolId, Expr> atom_value;
    auto value_of = [&](SymbolId a) -> const Expr* {
        auto it = atom_value.find(a);
        if (it != atom_value.end()) return &it->second;
        auto b = bindings.find(a);
        if (b != bindings.end()) return &atom_value.emplace(a, b->second).first->second;
        if (is_sqrt_atom(a)) {
            const Expr& r = *atom(a).radicand;
            Expr nr = substitute(r, bindings);
            if (nr == r) return nullptr;
            return &atom_value.emplace(a, sqrt(nr)).first->second;
        }
        if (desc(a).rule != Rule::None)
            // a derived symbol cannot follow its arguments to arbitrary values
            for (SymbolId l : leaves(a)) {
                auto lb = bindings.find(l);
                if (lb != bindings.end() && !(lb->second == Expr::sym(l)))
                    throw std::invalid_argument("substitution changes " + display_name(l) + " under derived symbol " +
                                                display_name(a) + "; bind the derived symbol too");
            }
        return nullptr;
    };
    std::vector<Expr> parts;
    std::vector<Term> untouched;
    for (auto& t : e.terms()) {
        Monomial keep;
        Expr acc(t.c);
        bool changed = false;
        for (auto& [a, k] : t.m) {
            const Expr* v = value_of(a);
            if (!v) {
                keep.emplace_back(a, k);
                continue;
            }
            changed = true;
            acc = acc * pow(*v, k);
        }
        if (!changed) {
            untouched.push_back(t);
            continue;
        }
        parts.push_back(acc * Expr::from_terms({Term{Rational(1), std::move(keep)}}));
    }
    parts.push_back(Expr::from_terms(std::move(untouched)));
    return sum(parts);
}

}  // namespace mfc

namespace mfc {

// Rewrites g_{mu n} g^{n sig} -> delta - sum_{nu<n} g_{mu nu} g^{nu sig} with n the
// highest index of the family. Each rewrite removes two occurrences of n from the
// index slots, so the loop terminates.
Expr metric_reduce(const Expr& e) {
    Expr cur = e;
    for (int guard = 0; guard < 64; ++guard) {
        std::vector<Expr> parts;
        std::vector<Term> keep;
        bool changed = false;
        for (auto& t : cur.terms()) {
            int gi = -1, hi = -1;
            std::string fam;
            int n = -1;
            for (std::size_t i = 0; i < t.m.size() && hi < 0; ++i) {
                SymbolId a = t.m[i].first;
                if (is_sqrt_atom(a) || t.m[i].second < 1) continue;
                const SymbolDesc& d = desc(a);
                if (d.kind != SymKind::Metric || !d.jet.empty() || d.rule != Rule::None) continue;
                const MetricFamily* m = find_metric(d.family);
                if (!m) continue;
                int top = m->dim - 1;
                if (d.comp[0] != top && d.comp[1] != top) continue;
                for (std::size_t j = 0; j < t.m.size(); ++j) {
                    SymbolId b = t.m[j].first;
                    if (is_sqrt_atom(b) || t.m[j].second < 1) continue;
                    const SymbolDesc& e2 = desc(b);
                    if (e2.rule != Rule::InverseMetric || e2.metric != d.family) continue;
                    if (e2.comp[0] != top && e2.comp[1] != top) continue;
                    gi = int(i);
                    hi = int(j);
                    fam = d.family;
                    n = top;
                    break;
                }
            }
            if (hi < 0) {
                keep.push_back(t);
                continue;
            }
            changed = true;
            const SymbolDesc& gd = desc(t.m[gi].first);
            const SymbolDesc& hd = desc(t.m[hi].first);
            int mu = gd.comp[0] == n ? gd.comp[1] : gd.comp[0];
            int sig = hd.comp[0] == n ? hd.comp[1] : hd.comp[0];
            Monomial rest = t.m;
            rest[gi].second -= 1;
            rest[hi].second -= 1;
            Monomial r2;
            for (auto& f : rest)
                if (f.second != 0) r2.push_back(f);
            Expr repl(mu == sig ? 1 : 0);
            for (int nu = 0; nu < n; ++nu)
                repl -= Expr::sym(metric_symbol(fam, mu, nu)) * Expr::sym(inverse_metric_symbol(fam, nu, sig));
            parts.push_back(Expr::from_terms({Term{t.c, std::move(r2)}}) * repl);
        }
        if (!changed) return cur;
        parts.push_back(Expr::from_terms(std::move(keep)));
        cur = sum(parts);
    }
    return cur;
}

}  // namespace mfc
