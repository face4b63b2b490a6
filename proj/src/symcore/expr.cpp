#include <algorithm>
#include <cmath>
#include <sstream>

#include "mfc/expr.hpp"

namespace mfc {

namespace detail {

struct Poly {
    std::vector<Term> terms;
    std::size_t hash = 0;

    static Expr make(std::vector<Term> t) {
        if (t.empty()) return Expr();
        auto p = std::make_shared<Poly>();
        p->terms = std::move(t);
        std::size_t h = 1469598103934665603ull;
        for (auto& term : p->terms) {
            h = h * 1099511628211ull ^ term.c.hash();
            for (auto& [a, k] : term.m) h = (h * 1099511628211ull) ^ (std::size_t(a) << 8 ^ std::size_t(k));
        }
        p->hash = h;
        return Expr(std::shared_ptr<const Poly>(std::move(p)));
    }
};

}  // namespace detail

namespace {

using detail::Poly;

const std::vector<Term>& empty_terms() {
    static const std::vector<Term> e;
    return e;
}

int cmp_mono(const Monomial& a, const Monomial& b) {
    std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i].first != b[i].first) return a[i].first < b[i].first ? -1 : 1;
        if (a[i].second != b[i].second) return a[i].second < b[i].second ? -1 : 1;
    }
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    return 0;
}

Monomial mul_mono(const Monomial& a, const Monomial& b) {
    Monomial r;
    r.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
            r.push_back(a[i++]);
        } else if (i == a.size() || b[j].first < a[i].first) {
            r.push_back(b[j++]);
        } else {
            int k = a[i].second + b[j].second;
            if (k != 0) r.emplace_back(a[i].first, k);
            ++i;
            ++j;
        }
    }
    return r;
}

bool needs_reduction(const Monomial& m) {
    for (auto& [a, k] : m)
        if (k >= 2 && is_sqrt_atom(a)) return true;
    return false;
}

// Sort, merge like monomials, drop zeros; sqrt atoms with exponent >= 2 are
// rewritten as radicand powers and re-expanded.
Expr normalize(std::vector<Term> t) {
    auto split = std::partition(t.begin(), t.end(), [](const Term& x) { return !needs_reduction(x.m); });
    std::vector<Term> reduce(std::make_move_iterator(split), std::make_move_iterator(t.end()));
    t.erase(split, t.end());
    std::sort(t.begin(), t.end(), [](const Term& a, const Term& b) { return cmp_mono(a.m, b.m) < 0; });
    std::vector<Term> out;
    out.reserve(t.size());
    for (auto& term : t) {
        if (!out.empty() && cmp_mono(out.back().m, term.m) == 0) {
            out.back().c += term.c;
        } else {
            if (!out.empty() && out.back().c.is_zero()) out.pop_back();
            out.push_back(std::move(term));
        }
    }
    if (!out.empty() && out.back().c.is_zero()) out.pop_back();
    Expr e = Poly::make(std::move(out));
    for (auto& term : reduce) {
        Monomial m;
        Expr extra(1);
        for (auto& [a, k] : term.m) {
            if (k >= 2 && is_sqrt_atom(a)) {
                extra = extra * pow(*atom(a).radicand, k / 2);
                if (k % 2) m.emplace_back(a, 1);
            } else {
                m.emplace_back(a, k);
            }
        }
        e = e + Expr::from_terms({Term{term.c, std::move(m)}}) * extra;
    }
    return e;
}

}  // namespace

Expr::Expr() : p_(nullptr) {}
Expr::Expr(std::int64_t v) : Expr(Rational(v)) {}
Expr::Expr(const Rational& r) {
    if (!r.is_zero()) *this = Poly::make({Term{r, {}}});
}

Expr Expr::sym(SymbolId s) {
    Monomial m;
    m.emplace_back(s, 1);
    return Poly::make({Term{Rational(1), std::move(m)}});
}

Expr Expr::from_terms(std::vector<Term> terms) { return normalize(std::move(terms)); }

const std::vector<Term>& Expr::terms() const { return p_ ? p_->terms : empty_terms(); }
bool Expr::is_zero() const { return terms().empty(); }
bool Expr::is_constant() const {
    auto& t = terms();
    return t.empty() || (t.size() == 1 && t[0].m.empty());
}
Rational Expr::constant_value() const {
    if (!is_constant()) throw std::logic_error("expression is not constant");
    return is_zero() ? Rational(0) : terms()[0].c;
}
std::size_t Expr::hash() const { return p_ ? p_->hash : 0; }

Expr operator+(const Expr& a, const Expr& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    auto& x = a.terms();
    auto& y = b.terms();
    std::vector<Term> out;
    out.reserve(x.size() + y.size());
    std::size_t i = 0, j = 0;
    while (i < x.size() || j < y.size()) {
        int c = i == x.size() ? 1 : j == y.size() ? -1 : cmp_mono(x[i].m, y[j].m);
        if (c < 0) {
            out.push_back(x[i++]);
        } else if (c > 0) {
            out.push_back(y[j++]);
        } else {
            Rational s = x[i].c + y[j].c;
            if (!s.is_zero()) out.push_back(Term{s, x[i].m});
            ++i;
            ++j;
        }
    }
    return Poly::make(std::move(out));
}

Expr Expr::operator-() const {
    if (is_zero()) return *this;
    std::vector<Term> t = terms();
    for (auto& term : t) term.c = -term.c;
    return Poly::make(std::move(t));
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
    if (a.is_zero() || b.is_zero()) return Expr();
    auto& x = a.terms();
    auto& y = b.terms();
    if (x.size() == 1 && x[0].m.empty()) return scale(b, x[0].c);
    if (y.size() == 1 && y[0].m.empty()) return scale(a, y[0].c);
    std::vector<Term> out;
    out.reserve(x.size() * y.size());
    for (auto& s : x)
        for (auto& t : y) out.push_back(Term{s.c * t.c, mul_mono(s.m, t.m)});
    return normalize(std::move(out));
}

bool operator==(const Expr& a, const Expr& b) {
    if (a.p_ == b.p_) return true;
    if (a.hash() != b.hash()) return false;
    auto& x = a.terms();
    auto& y = b.terms();
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i].c != y[i].c || cmp_mono(x[i].m, y[i].m) != 0) return false;
    return true;
}

Expr scale(const Expr& e, const Rational& r) {
    if (r.is_zero() || e.is_zero()) return Expr();
    if (r.is_one()) return e;
    std::vector<Term> t = e.terms();
    for (auto& term : t) term.c *= r;
    return Poly::make(std::move(t));
}

Expr sum(const std::vector<Expr>& xs) {
    if (xs.empty()) return Expr();
    std::vector<Term> all;
    for (auto& x : xs) all.insert(all.end(), x.terms().begin(), x.terms().end());
    return normalize(std::move(all));
}

Expr pow(const Expr& e, int k) {
    if (k == 0) return Expr(1);
    if (k < 0) {
        auto& t = e.terms();
        if (t.empty()) throw std::domain_error("division by zero expression");
        if (t.size() == 1) {
            Monomial m;
            for (auto& [a, x] : t[0].m) m.emplace_back(a, -x);
            Expr inv = Expr::from_terms({Term{Rational(1) / t[0].c, std::move(m)}});
            return pow(inv, -k);
        }
        // 1/P = P * |P|^-2 is exact for either sign of P
        Expr s = Expr::from_terms({Term{Rational(1), Monomial{Factor{sqrt_atom(e * e), -2}}}});
        return pow(e * s, -k);
    }
    Expr result(1), base = e;
    while (k) {
        if (k & 1) result = result * base;
        k >>= 1;
        if (k) base = base * base;
    }
    return result;
}

Expr sqrt(const Expr& e) {
    if (e.is_zero()) return Expr();
    if (e.is_constant()) {
        Rational r = e.constant_value();
        if (r.sign() < 0) throw NegativeRadicand("sqrt of negative constant " + r.str());
        auto isqrt = [](std::int64_t v) -> std::int64_t {
            auto s = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(v))));
            for (auto c : {s - 1, s, s + 1})
                if (c >= 0 && c * c == v) return c;
            return -1;
        };
        auto n = isqrt(r.num()), d = isqrt(r.den());
        if (n >= 0 && d > 0) return Expr(Rational(n, d));
    }
    return Expr::from_terms({Term{Rational(1), Monomial{Factor{sqrt_atom(e), 1}}}});
}

Expr canonicalize(const Expr& e) { return Expr::from_terms(e.terms()); }

Expr clear_sqrt_denominators(const Expr& e) {
    std::map<SymbolId, int> lo;
    for (auto& t : e.terms())
        for (auto& [a, k] : t.m)
            if (k < 0 && is_sqrt_atom(a)) {
                auto [it, fresh] = lo.emplace(a, k);
                if (!fresh) it->second = std::min(it->second, k);
            }
    if (lo.empty()) return e;
    Expr f(1);
    for (auto& [a, k] : lo) f = f * Expr::from_terms({Term{Rational(1), Monomial{Factor{a, -k}}}});
    return e * f;
}

bool equal_symbolic(const Expr& a, const Expr& b) {
    Expr d = clear_sqrt_denominators(a - b);
    if (d.is_zero()) return true;
    Expr r = metric_reduce(d);
    return r.is_zero() || metric_zero_test(r);
}

std::vector<SymbolId> atoms_of(const Expr& e) {
    std::vector<SymbolId> out;
    for (auto& t : e.terms())
        for (auto& f : t.m) out.push_back(f.first);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<SymbolId> free_symbols(const Expr& e) {
    std::vector<SymbolId> out;
    for (SymbolId a : atoms_of(e)) {
        auto& l = leaves(a);
        out.insert(out.end(), l.begin(), l.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool depends_on(const Expr& e, SymbolId s) {
    for (SymbolId a : atoms_of(e)) {
        if (a == s) return true;
        auto& l = leaves(a);
        if (std::binary_search(l.begin(), l.end(), s)) return true;
    }
    return false;
}

std::map<Monomial, Expr> collect(const Expr& e, const std::vector<SymbolId>& atoms) {
    std::vector<SymbolId> sorted = atoms;
    std::sort(sorted.begin(), sorted.end());
    std::map<Monomial, std::vector<Term>> parts;
    for (auto& t : e.terms()) {
        Monomial key, rest;
        for (auto& f : t.m) (std::binary_search(sorted.begin(), sorted.end(), f.first) ? key : rest).push_back(f);
        parts[key].push_back(Term{t.c, std::move(rest)});
    }
    std::map<Monomial, Expr> out;
    for (auto& [k, v] : parts) {
        Expr c = Expr::from_terms(std::move(v));
        if (!c.is_zero()) out.emplace(k, c);
    }
    return out;
}

std::string Expr::str() const {
    auto& t = terms();
    if (t.empty()) return "0";
    std::ostringstream os;
    for (std::size_t i = 0; i < t.size(); ++i) {
        Rational c = t[i].c;
        bool neg = c.sign() < 0;
        if (neg) c = -c;
        if (i == 0)
            os << (neg ? "-" : "");
        else
            os << (neg ? " - " : " + ");
        bool first = true;
        if (!c.is_one() || t[i].m.empty()) {
            os << c.str();
            first = false;
        }
        for (auto& [a, k] : t[i].m) {
            if (!first) os << "*";
            first = false;
            os << display_name(a);
            if (k != 1) os << "^" << (k < 0 ? "(" + std::to_string(k) + ")" : std::to_string(k));
        }
    }
    return os.str();
}

}  // namespace mfc
