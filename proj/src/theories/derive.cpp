#include "mfc/theories.hpp"

namespace mfc {

namespace {

std::pair<std::string, std::string> split_key(const std::string& key) {
    auto dot = key.find('.');
    if (dot == std::string::npos) return {key, ""};
    return {key.substr(0, dot), key.substr(dot + 1)};
}

// Omega_L without the terms containing a differential of the parametric metric
DiffForm dg_free_part(const JetBundle& jb, const DiffForm& om, const std::string& metric) {
    DiffForm r(om.chart(), om.degree());
    auto gf = jb.field_fibers(jb.field_index(metric));
    for (auto& [w, c] : om.terms()) {
        bool has_dg = false;
        for (auto i : w)
            for (int A : gf) has_dg |= int(i) == jb.base_dim() + A;
        if (!has_dg) r.add(w, c);
    }
    return r;
}

std::vector<Expr> el_of_field(const JetBundle& jb, const std::vector<Expr>& el, const std::string& field) {
    auto var = jb.variational_fibers();
    std::vector<Expr> r;
    for (std::size_t i = 0; i < var.size(); ++i)
        if (desc(jb.y(var[i])).family == field) r.push_back(el[i]);
    return r;
}

// h_{as} h_{br} E^{sr} with E^{sr} the symmetric derivative, for a <= b
std::vector<Expr> el_lowered(const JetBundle& jb, const std::vector<Expr>& el, const std::string& metric) {
    auto var = jb.variational_fibers();
    const int n1 = jb.base_dim();
    auto sym = [&](int s, int r) {
        int lo = std::min(s, r), hi = std::max(s, r);
        for (std::size_t i = 0; i < var.size(); ++i) {
            const SymbolDesc& d = desc(jb.y(var[i]));
            if (d.family == metric && d.comp[0] == lo && d.comp[1] == hi)
                return scale(el[i], Rational(1, lo == hi ? 1 : 2));
        }
        throw std::logic_error("missing metric component");
    };
    auto h = [&](int a, int b) { return Expr::sym(metric_symbol(metric, a, b)); };
    std::vector<Expr> r;
    for (int a = 0; a < n1; ++a)
        for (int b = a; b < n1; ++b) {
            Expr low;
            for (int s = 0; s < n1; ++s)
                for (int q = 0; q < n1; ++q) low += h(a, s) * h(b, q) * sym(s, q);
            r.push_back(low);
        }
    return r;
}

}  // namespace

Expected derive_expected(const Theory& t, const std::string& key) {
    const JetBundle& jb = *t.bundle;
    auto [head, tail] = split_key(key);
    if (key == "legendre.momenta") {
        auto lr = legendre(jb, t.L);
        std::vector<Expr> out;
        for (int A : jb.variational_fibers())
            for (int mu = 0; mu < jb.base_dim(); ++mu) out.push_back(lr.momenta.at(jb.mom(A, mu)));
        return out;
    }
    if (key == "legendre.p") return legendre(jb, t.L).p;
    if (key == "cartan_form") return cartan_form(jb, t.L);
    if (key == "omega_L") return omega_L(jb, t.L);
    if (key == "omega_L.dg_free") return dg_free_part(jb, omega_L(jb, t.L), t.meta.metric_field);
    if (key == "euler_lagrange") return euler_lagrange(jb, t.L);
    if (head == "euler_lagrange") {
        auto el = euler_lagrange(jb, t.L);
        const std::string low = "_lowered";
        if (tail.size() > low.size() && tail.compare(tail.size() - low.size(), low.size(), low) == 0)
            return el_lowered(jb, el, tail.substr(0, tail.size() - low.size()));
        return el_of_field(jb, el, tail);
    }
    if (head == "momentum_map") return covariant_momentum_map(t, t.generator(tail));
    if (head == "lagrangian_momentum_map") return lagrangian_momentum_map(t, t.generator(tail));
    if (head == "noether_current") return noether_current(t, t.generator(tail), generic_section(jb));
    if (head == "variation_of_L") return variation_of_L(t, t.generator(tail));
    if (key == "stress_energy") {
        std::vector<Expr> out;
        for (auto& [sr, c] : stress_energy_from_parametric_metric(t)) out.push_back(c);
        return out;
    }
    if (key == "vertical_transitivity") return vertical_transitivity(t).verdict;
    throw std::out_of_range("no derivation for key '" + key + "'");
}

Comparison compare_expected(const Expected& got, const Expected& want, int n_samples, double tol,
                            std::uint64_t seed) {
    if (got.index() != want.index()) return {};
    Comparison c;
    auto one = [&](const auto& a, const auto& b) {
        if (equal_symbolic(a, b)) return true;
        if (equal_numeric(a, b, n_samples, tol, seed)) {
            c.numeric_fallback = true;
            return true;
        }
        return false;
    };
    if (auto* b = std::get_if<bool>(&got)) {
        c.equal = *b == std::get<bool>(want);
    } else if (auto* e = std::get_if<Expr>(&got)) {
        c.equal = one(*e, std::get<Expr>(want));
    } else if (auto* v = std::get_if<std::vector<Expr>>(&got)) {
        const auto& w = std::get<std::vector<Expr>>(want);
        c.equal = v->size() == w.size();
        for (std::size_t i = 0; c.equal && i < v->size(); ++i) c.equal = one((*v)[i], w[i]);
    } else {
        c.equal = one(std::get<DiffForm>(got), std::get<DiffForm>(want));
    }
    return c;
}

}  // namespace mfc
