#include <algorithm>
#include <set>
#include <sstream>

#include "mfc/geometry.hpp"

namespace mfc {

SymbolId base_coord(int mu) {
    SymbolDesc d;
    d.family = "x";
    d.kind = SymKind::BaseCoord;
    d.comp = {mu};
    d.comp_up = {true};
    return intern(std::move(d));
}

Chart::Chart(std::string label, std::vector<SymbolId> coords, int base_dim)
    : label_(std::move(label)), coords_(std::move(coords)), base_dim_(base_dim) {
    for (int i = 0; i < int(coords_.size()); ++i) {
        if (!pos_.emplace(coords_[i], i).second)
            throw std::invalid_argument("duplicate coordinate " + display_name(coords_[i]) + " in chart " + label_);
        if (i < base_dim_ && desc(coords_[i]).kind != SymKind::BaseCoord)
            throw std::invalid_argument("chart " + label_ + ": base coordinates must come first");
    }
}

int Chart::index_of(SymbolId s) const {
    auto it = pos_.find(s);
    return it == pos_.end() ? -1 : it->second;
}

Expr partial(const Expr& e, const Chart& c, int i) {
    SymbolId s = c.coord(i);
    if (i >= c.base_dim()) return diff(e, s);
    int mu = desc(s).comp[0];
    // symbols that are not coordinates here but live over the base point
    auto implicit = [&](SymbolId l) {
        const SymbolDesc& d = desc(l);
        return d.xdep || (d.field && !c.has(l));
    };
    bool any = false;
    for (SymbolId l : free_symbols(e))
        if (implicit(l)) {
            any = true;
            break;
        }
    if (!any) return diff(e, s);
    return apply_derivation(e, [&](SymbolId l) -> Expr {
        if (l == s) return Expr(1);
        if (implicit(l)) return Expr::sym(jet_successor(l, mu));
        return Expr();
    });
}

namespace {

// sort idx in place, return permutation sign, 0 on repeats
int sort_sign(Wedge& w) {
    int sign = 1;
    for (std::size_t i = 1; i < w.size(); ++i)
        for (std::size_t j = i; j > 0 && w[j - 1] >= w[j]; --j) {
            if (w[j - 1] == w[j]) return 0;
            std::swap(w[j - 1], w[j]);
            sign = -sign;
        }
    return sign;
}

void require_same(const ChartPtr& a, const ChartPtr& b) {
    if (a != b && !(*a == *b)) throw ChartMismatch("chart mismatch: " + a->label() + " vs " + b->label());
}

}  // namespace

DiffForm::DiffForm(ChartPtr c, int degree) : chart_(std::move(c)), degree_(degree) {}

DiffForm DiffForm::function(ChartPtr c, const Expr& f) {
    DiffForm r(std::move(c), 0);
    r.add({}, f);
    return r;
}

DiffForm DiffForm::dcoord(ChartPtr c, int i) {
    DiffForm r(std::move(c), 1);
    r.add(Wedge{std::uint16_t(i)}, Expr(1));
    return r;
}

DiffForm DiffForm::monomial(ChartPtr c, const Expr& coeff, std::vector<int> idx) {
    DiffForm r(std::move(c), int(idx.size()));
    Wedge w;
    for (int i : idx) w.push_back(std::uint16_t(i));
    int s = sort_sign(w);
    if (s != 0) r.add(w, s > 0 ? coeff : -coeff);
    return r;
}

Expr DiffForm::coeff(const Wedge& w) const {
    auto it = terms_.find(w);
    return it == terms_.end() ? Expr() : it->second;
}

Expr DiffForm::coeff(std::vector<int> idx) const {
    Wedge w;
    for (int i : idx) w.push_back(std::uint16_t(i));
    int s = sort_sign(w);
    if (s == 0) return Expr();
    Expr c = coeff(w);
    return s > 0 ? c : -c;
}

void DiffForm::add(const Wedge& w, const Expr& c) {
    if (int(w.size()) != degree_) throw std::logic_error("wedge length does not match form degree");
    if (c.is_zero()) return;
    auto it = terms_.find(w);
    if (it == terms_.end()) {
        terms_.emplace(w, c);
        return;
    }
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
}

DiffForm DiffForm::operator+(const DiffForm& o) const {
    require_same(chart_, o.chart_);
    if (o.is_zero()) return *this;
    if (is_zero()) return o;
    if (degree_ != o.degree_) throw std::logic_error("adding forms of different degree");
    DiffForm r = *this;
    for (auto& [w, c] : o.terms_) r.add(w, c);
    return r;
}

DiffForm DiffForm::operator-() const {
    return map_coeffs([](const Expr& c) { return -c; });
}

DiffForm DiffForm::operator-(const DiffForm& o) const { return *this + (-o); }

DiffForm operator*(const Expr& f, const DiffForm& a) {
    return a.map_coeffs([&](const Expr& c) { return f * c; });
}

bool DiffForm::operator==(const DiffForm& o) const {
    if (!(*chart_ == *o.chart_)) return false;
    if (is_zero() && o.is_zero()) return true;
    return degree_ == o.degree_ && terms_.size() == o.terms_.size() &&
           std::equal(terms_.begin(), terms_.end(), o.terms_.begin(),
                      [](auto& x, auto& y) { return x.first == y.first && x.second == y.second; });
}

std::string DiffForm::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [w, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << "(" << c.str() << ")";
        for (std::size_t i = 0; i < w.size(); ++i)
            os << (i ? "^" : " ") << "d" << display_name(chart_->coord(w[i]));
    }
    return os.str();
}

VectorField::VectorField(ChartPtr c) : chart_(std::move(c)), comps_(chart_->dim()) {}

VectorField::VectorField(ChartPtr c, std::vector<Expr> comps) : chart_(std::move(c)), comps_(std::move(comps)) {
    if (int(comps_.size()) != chart_->dim()) throw std::invalid_argument("vector field component count mismatch");
}

VectorField VectorField::coordinate(ChartPtr c, int i) {
    VectorField v(std::move(c));
    v.comps_[i] = Expr(1);
    return v;
}

bool VectorField::is_zero() const {
    return std::all_of(comps_.begin(), comps_.end(), [](const Expr& e) { return e.is_zero(); });
}

VectorField VectorField::operator+(const VectorField& o) const {
    require_same(chart_, o.chart_);
    VectorField r = *this;
    for (std::size_t i = 0; i < comps_.size(); ++i) r.comps_[i] += o.comps_[i];
    return r;
}

VectorField VectorField::operator-(const VectorField& o) const {
    require_same(chart_, o.chart_);
    VectorField r = *this;
    for (std::size_t i = 0; i < comps_.size(); ++i) r.comps_[i] -= o.comps_[i];
    return r;
}

VectorField operator*(const Expr& f, const VectorField& v) {
    VectorField r = v;
    for (auto& c : r.comps_) c = f * c;
    return r;
}

bool VectorField::operator==(const VectorField& o) const { return *chart_ == *o.chart_ && comps_ == o.comps_; }

Expr VectorField::apply(const Expr& f) const {
    std::vector<Expr> parts;
    for (int i = 0; i < chart_->dim(); ++i)
        if (!comps_[i].is_zero()) parts.push_back(comps_[i] * partial(f, *chart_, i));
    return sum(parts);
}

std::string VectorField::str() const {
    std::ostringstream os;
    bool first = true;
    for (int i = 0; i < chart_->dim(); ++i) {
        if (comps_[i].is_zero()) continue;
        if (!first) os << " + ";
        first = false;
        os << "(" << comps_[i].str() << ") d/d" << display_name(chart_->coord(i));
    }
    return first ? "0" : os.str();
}

VectorField bracket(const VectorField& v, const VectorField& w) {
    require_same(v.chart(), w.chart());
    VectorField r(v.chart());
    for (int i = 0; i < v.chart()->dim(); ++i) r[i] = v.apply(w[i]) - w.apply(v[i]);
    return r;
}

ChartMap ChartMap::identity(ChartPtr c) {
    ChartMap m{c, c, {}, std::nullopt, {}};
    for (SymbolId s : c->coords()) m.components.push_back(Expr::sym(s));
    m.inverse = m.components;
    return m;
}

std::unordered_map<SymbolId, Expr> ChartMap::bindings() const {
    std::unordered_map<SymbolId, Expr> b;
    for (int i = 0; i < target->dim(); ++i) {
        Expr self = Expr::sym(target->coord(i));
        if (!(components[i] == self)) b.emplace(target->coord(i), components[i]);
    }
    for (auto& [s, e] : extra) b.emplace(s, e);
    return b;
}

Expr ChartMap::pull(const Expr& f) const { return substitute(f, bindings()); }

ChartMap compose(const ChartMap& outer, const ChartMap& inner) {
    require_same(outer.source, inner.target);
    ChartMap r{inner.source, outer.target, {}, std::nullopt, {}};
    auto b = inner.bindings();
    for (auto& c : outer.components) r.components.push_back(substitute(c, b));
    for (auto& [s, e] : outer.extra) r.extra.emplace(s, substitute(e, b));
    if (outer.inverse && inner.inverse) {
        ChartMap oi{outer.target, outer.source, *outer.inverse, std::nullopt, {}};
        auto bo = oi.bindings();
        std::vector<Expr> inv;
        for (auto& c : *inner.inverse) inv.push_back(substitute(c, bo));
        r.inverse = inv;
    }
    return r;
}

bool check_inverse(const ChartMap& m, int n_samples, std::uint64_t seed) {
    if (!m.inverse) return false;
    ChartMap inv{m.target, m.source, *m.inverse, std::nullopt, {}};
    ChartMap there_back = compose(inv, m);
    ChartMap back_there = compose(m, inv);
    for (int i = 0; i < m.source->dim(); ++i) {
        Expr id = Expr::sym(m.source->coord(i));
        if (!equal_symbolic(there_back.components[i], id) &&
            !equal_numeric(there_back.components[i], id, n_samples, 1e-9, seed))
            return false;
    }
    for (int i = 0; i < m.target->dim(); ++i) {
        Expr id = Expr::sym(m.target->coord(i));
        if (!equal_symbolic(back_there.components[i], id) &&
            !equal_numeric(back_there.components[i], id, n_samples, 1e-9, seed))
            return false;
    }
    return true;
}

DiffForm wedge(const DiffForm& a, const DiffForm& b) {
    require_same(a.chart(), b.chart());
    DiffForm r(a.chart(), a.degree() + b.degree());
    std::map<Wedge, std::vector<Expr>> acc;
    for (auto& [wa, ca] : a.terms())
        for (auto& [wb, cb] : b.terms()) {
            Wedge w = wa;
            w.insert(w.end(), wb.begin(), wb.end());
            int s = sort_sign(w);
            if (s == 0) continue;
            Expr c = ca * cb;
            acc[w].push_back(s > 0 ? c : -c);
        }
    for (auto& [w, cs] : acc) r.add(w, sum(cs));
    return r;
}

DiffForm exterior_d(const DiffForm& a) {
    const Chart& c = *a.chart();
    DiffForm r(a.chart(), a.degree() + 1);
    std::map<Wedge, std::vector<Expr>> acc;
    for (auto& [w, f] : a.terms()) {
        auto fs = free_symbols(f);
        bool xdep = std::any_of(fs.begin(), fs.end(), [&](SymbolId s) {
            const SymbolDesc& d = desc(s);
            return d.xdep || (d.field && !c.has(s));
        });
        for (int i = 0; i < c.dim(); ++i) {
            if (std::find(w.begin(), w.end(), i) != w.end()) continue;
            if (!(i < c.base_dim() && xdep) && !std::binary_search(fs.begin(), fs.end(), c.coord(i))) continue;
            Expr df = partial(f, c, i);
            if (df.is_zero()) continue;
            Wedge nw;
            nw.push_back(std::uint16_t(i));
            nw.insert(nw.end(), w.begin(), w.end());
            int s = sort_sign(nw);
            acc[nw].push_back(s > 0 ? df : -df);
        }
    }
    for (auto& [w, cs] : acc) r.add(w, sum(cs));
    return r;
}

DiffForm interior(const VectorField& v, const DiffForm& a) {
    require_same(v.chart(), a.chart());
    if (a.degree() == 0) throw DegreeZero("interior product of a 0-form");
    DiffForm r(a.chart(), a.degree() - 1);
    std::map<Wedge, std::vector<Expr>> acc;
    for (auto& [w, f] : a.terms())
        for (std::size_t j = 0; j < w.size(); ++j) {
            const Expr& vj = v[w[j]];
            if (vj.is_zero()) continue;
            Wedge nw = w;
            nw.erase(nw.begin() + j);
            Expr c = vj * f;
            acc[nw].push_back(j % 2 ? -c : c);
        }
    for (auto& [w, cs] : acc) r.add(w, sum(cs));
    return r;
}

DiffForm pullback(const ChartMap& m, const DiffForm& a) {
    require_same(m.target, a.chart());
    auto b = m.bindings();
    // d(phi^i) for each target coordinate used
    std::map<int, DiffForm> dphi;
    auto get_dphi = [&](int i) -> const DiffForm& {
        auto it = dphi.find(i);
        if (it != dphi.end()) return it->second;
        return dphi.emplace(i, exterior_d(DiffForm::function(m.source, m.components[i]))).first->second;
    };
    DiffForm r(m.source, a.degree());
    for (auto& [w, f] : a.terms()) {
        DiffForm t = DiffForm::function(m.source, substitute(f, b));
        for (auto i : w) {
            t = wedge(t, get_dphi(i));
            if (t.is_zero()) break;
        }
        if (!t.is_zero()) r += t;
    }
    return r;
}

DiffForm lie_derivative(const VectorField& v, const DiffForm& a) {
    DiffForm r = interior(v, exterior_d(a));
    if (a.degree() > 0) r += exterior_d(interior(v, a));
    return r;
}

DiffForm volume(ChartPtr c) {
    std::vector<int> idx;
    for (int i = 0; i < c->base_dim(); ++i) idx.push_back(i);
    return DiffForm::monomial(std::move(c), Expr(1), idx);
}

DiffForm volume_n(ChartPtr c, int mu) { return interior(VectorField::coordinate(c, mu), volume(c)); }

DiffForm volume_nm1(ChartPtr c, int mu, int nu) {
    return interior(VectorField::coordinate(c, nu), volume_n(c, mu));
}

bool equal_symbolic(const DiffForm& a, const DiffForm& b) {
    DiffForm d = a - b;
    for (auto& [w, c] : d.terms())
        if (!equal_symbolic(c, Expr())) return false;
    return true;
}

bool equal_numeric(const DiffForm& a, const DiffForm& b, int n_samples, double tol, std::uint64_t seed) {
    std::set<Wedge> keys;
    for (auto& [w, c] : a.terms()) keys.insert(w);
    for (auto& [w, c] : b.terms()) keys.insert(w);
    for (auto& w : keys)
        if (!equal_numeric(a.coeff(w), b.coeff(w), n_samples, tol, seed)) return false;
    return true;
}

}  // namespace mfc
