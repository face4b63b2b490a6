#include <algorithm>

#include "mfc/jets.hpp"

namespace mfc {

SymbolId jet_parameter(const std::string& name, std::vector<int> comp, std::vector<bool> up) {
    SymbolDesc d;
    d.family = name;
    d.kind = SymKind::FreeParameter;
    if (up.empty()) up.assign(comp.size(), false);
    d.comp = std::move(comp);
    d.comp_up = std::move(up);
    d.xdep = true;
    return intern(std::move(d));
}

namespace {

SymbolId fiber_symbol(const FieldSpec& f, std::vector<int> comp, std::vector<bool> up) {
    SymbolDesc d;
    d.family = f.name;
    d.kind = SymKind::FiberCoord;
    d.comp = std::move(comp);
    d.comp_up = std::move(up);
    d.field = true;
    d.variational = f.variational;
    return intern(std::move(d));
}

}  // namespace

JetBundle::JetBundle(BundleSpec spec) : spec_(std::move(spec)) {
    const int n1 = spec_.base_dim;
    if (n1 < 1) throw InvalidBundle("base dimension must be at least 1");
    if (spec_.fields.empty()) throw InvalidBundle("bundle has no fields");
    bool any_var = false;
    for (std::size_t i = 0; i < spec_.fields.size(); ++i) {
        const FieldSpec& f = spec_.fields[i];
        if (f.name.empty() || f.name == "x" || f.name == "p" || f.name.rfind("p_", 0) == 0)
            throw InvalidBundle("reserved field name '" + f.name + "'");
        for (std::size_t j = 0; j < i; ++j)
            if (spec_.fields[j].name == f.name) throw DuplicateFieldName("duplicate field '" + f.name + "'");
        any_var |= f.variational;
        switch (f.index) {
            case IndexStructure::Scalar:
                if (f.target_dim < 1) throw InvalidBundle("field '" + f.name + "' needs a positive target dimension");
                for (int a = 0; a < f.target_dim; ++a) {
                    fiber_.push_back(fiber_symbol(f, {a}, {true}));
                    field_of_.push_back(int(i));
                }
                break;
            case IndexStructure::Covector:
                for (int nu = 0; nu < n1; ++nu) {
                    fiber_.push_back(fiber_symbol(f, {nu}, {false}));
                    field_of_.push_back(int(i));
                }
                break;
            case IndexStructure::Sym2:
                try {
                    register_metric({f.name, n1, f.negatives, f.variational});
                } catch (const std::invalid_argument& e) {
                    throw InvalidBundle(e.what());
                }
                for (int s = 0; s < n1; ++s)
                    for (int r = s; r < n1; ++r) {
                        fiber_.push_back(metric_symbol(f.name, s, r));
                        field_of_.push_back(int(i));
                    }
                break;
        }
    }
    if (!any_var) throw InvalidBundle("bundle has no variational field");
    for (int A = 0; A < fiber_dim(); ++A) {
        var_.push_back(spec_.fields[field_of_[A]].variational);
        fiber_pos_.emplace(fiber_[A], A);
    }

    std::vector<SymbolId> xs;
    for (int mu = 0; mu < n1; ++mu) xs.push_back(base_coord(mu));
    X_ = std::make_shared<Chart>("X", xs, n1);
    std::vector<SymbolId> ys = xs;
    ys.insert(ys.end(), fiber_.begin(), fiber_.end());
    Y_ = std::make_shared<Chart>("Y", ys, n1);
    std::vector<SymbolId> j1 = ys;
    for (int A = 0; A < fiber_dim(); ++A)
        if (var_[A])
            for (int mu = 0; mu < n1; ++mu) j1.push_back(v(A, mu));
    J1Y_ = std::make_shared<Chart>("J1Y", j1, n1);
    std::vector<SymbolId> j2 = j1;
    for (int A = 0; A < fiber_dim(); ++A)
        if (var_[A])
            for (int mu = 0; mu < n1; ++mu)
                for (int nu = mu; nu < n1; ++nu) j2.push_back(w(A, mu, nu));
    J2Y_ = std::make_shared<Chart>("J2Y", j2, n1);
    std::vector<SymbolId> zs = ys;
    zs.push_back(p());
    for (int A = 0; A < fiber_dim(); ++A)
        if (var_[A])
            for (int mu = 0; mu < n1; ++mu) zs.push_back(mom(A, mu));
    Z_ = std::make_shared<Chart>("Z", zs, n1);
}

int JetBundle::fiber_index(SymbolId s) const {
    auto it = fiber_pos_.find(s);
    return it == fiber_pos_.end() ? -1 : it->second;
}

std::vector<int> JetBundle::variational_fibers() const {
    std::vector<int> r;
    for (int A = 0; A < fiber_dim(); ++A)
        if (var_[A]) r.push_back(A);
    return r;
}

std::vector<int> JetBundle::field_fibers(int field) const {
    std::vector<int> r;
    for (int A = 0; A < fiber_dim(); ++A)
        if (field_of_[A] == field) r.push_back(A);
    return r;
}

int JetBundle::field_index(const std::string& name) const {
    for (std::size_t i = 0; i < spec_.fields.size(); ++i)
        if (spec_.fields[i].name == name) return int(i);
    return -1;
}

SymbolId JetBundle::v(int A, int mu) const { return jet_successor(fiber_[A], mu); }

SymbolId JetBundle::w(int A, int mu, int nu) const { return jet_successor(jet_successor(fiber_[A], mu), nu); }

SymbolId JetBundle::p() const {
    SymbolDesc d;
    d.family = "p";
    d.kind = SymKind::CovHamiltonian;
    return intern(std::move(d));
}

SymbolId JetBundle::mom(int A, int mu) const {
    if (!var_[A]) throw std::invalid_argument("parametric field " + display_name(fiber_[A]) + " has no multimomenta");
    const SymbolDesc& y = desc(fiber_[A]);
    SymbolDesc d;
    d.family = "p_" + y.family;
    d.kind = SymKind::Multimomentum;
    d.comp = y.comp;
    for (std::size_t i = 0; i < y.comp.size(); ++i) d.comp_up.push_back(!y.comp_up[i]);
    d.comp.push_back(mu);
    d.comp_up.push_back(true);
    return intern(std::move(d));
}

JetBundlePtr jet_charts(const BundleSpec& b) { return std::make_shared<const JetBundle>(b); }

SymbolicSection generic_section(const JetBundle& jb) {
    SymbolicSection s;
    for (SymbolId y : jb.fiber()) s.components.push_back(Expr::sym(y));
    return s;
}

ChartMap prolong_section(const JetBundle& jb, const SymbolicSection& phi, int order) {
    if (int(phi.components.size()) != jb.fiber_dim())
        throw std::invalid_argument("section has the wrong number of components");
    const int n1 = jb.base_dim();
    const Chart& X = *jb.X();
    ChartMap m{jb.X(), order >= 2 ? jb.J2Y() : jb.J1Y(), {}, std::nullopt, {}};
    std::unordered_map<SymbolId, Expr> val;
    for (int mu = 0; mu < n1; ++mu) val.emplace(jb.x(mu), Expr::sym(jb.x(mu)));
    for (int A = 0; A < jb.fiber_dim(); ++A) {
        const Expr& f = phi.components[A];
        val.emplace(jb.y(A), f);
        bool generic = f == Expr::sym(jb.y(A));
        for (int mu = 0; mu < n1; ++mu) {
            Expr d1 = partial(f, X, mu);
            val.emplace(jb.v(A, mu), d1);
            for (int nu = mu; nu < n1 && order >= 2; ++nu) val.emplace(jb.w(A, mu, nu), partial(d1, X, nu));
            if (!jb.variational(A) && !generic) {
                m.extra.emplace(jb.v(A, mu), d1);
                for (int nu = mu; nu < n1; ++nu) m.extra.emplace(jb.w(A, mu, nu), partial(d1, X, nu));
            }
        }
    }
    for (SymbolId s : m.target->coords()) m.components.push_back(val.at(s));
    return m;
}

Expr total_derivative(const JetBundle& jb, const Expr& e, int mu) { return partial(e, *jb.X(), mu); }

void require_projectable(const JetBundle& jb, const VectorField& V) {
    for (int mu = 0; mu < jb.base_dim(); ++mu)
        for (SymbolId s : free_symbols(V[mu]))
            if (desc(s).field || jb.fiber_index(s) >= 0)
                throw NotProjectable("base component " + std::to_string(mu) + " depends on " + display_name(s));
}

namespace {

void require_chart(const VectorField& V, const ChartPtr& c) {
    if (!(*V.chart() == *c)) throw ChartMismatch("expected a vector field on " + c->label());
}

void require_map_on(const ChartMap& m, const ChartPtr& c) {
    if (!(*m.source == *c) || !(*m.target == *c)) throw ChartMismatch("expected an automorphism of " + c->label());
}

void require_fiber_free(const JetBundle& jb, const Expr& e, const char* what) {
    for (SymbolId s : free_symbols(e))
        if (desc(s).field || jb.fiber_index(s) >= 0)
            throw NotProjectable(std::string(what) + " depends on fiber coordinate " + display_name(s));
}

std::unordered_map<SymbolId, Expr> base_bindings(const JetBundle& jb, const std::vector<Expr>& comps) {
    std::unordered_map<SymbolId, Expr> b;
    for (int mu = 0; mu < jb.base_dim(); ++mu) b.emplace(jb.x(mu), comps[mu]);
    return b;
}

// J1Y components of j^1 eta given eta's Y components and eta_X^{-1}
std::vector<Expr> prolong_components(const JetBundle& jb, const std::vector<Expr>& eta, const std::vector<Expr>& inv) {
    const int n1 = jb.base_dim();
    for (int mu = 0; mu < n1; ++mu) {
        require_fiber_free(jb, eta[mu], "base map");
        require_fiber_free(jb, inv[mu], "inverse base map");
    }
    // M[mu][nu] = d_mu (eta_X^{-1})^nu at eta_X(x)
    auto at_image = base_bindings(jb, eta);
    std::vector<std::vector<Expr>> M(n1, std::vector<Expr>(n1));
    for (int mu = 0; mu < n1; ++mu)
        for (int nu = 0; nu < n1; ++nu) M[mu][nu] = substitute(partial(inv[nu], *jb.X(), mu), at_image);
    std::vector<Expr> out(eta.begin(), eta.begin() + jb.Y()->dim());
    for (int A = 0; A < jb.fiber_dim(); ++A) {
        if (!jb.variational(A)) continue;
        const Expr& etaA = eta[n1 + A];
        std::vector<Expr> D(n1);
        for (int nu = 0; nu < n1; ++nu) D[nu] = total_derivative(jb, etaA, nu);
        for (int mu = 0; mu < n1; ++mu) {
            Expr c;
            for (int nu = 0; nu < n1; ++nu) c += D[nu] * M[mu][nu];
            out.push_back(c);
        }
    }
    return out;
}

Expr determinant(std::vector<std::vector<Expr>> a) {
    const int n = int(a.size());
    if (n == 0) return Expr(1);
    if (n == 1) return a[0][0];
    Expr r;
    for (int j = 0; j < n; ++j) {
        if (a[0][j].is_zero()) continue;
        std::vector<std::vector<Expr>> minor;
        for (int i = 1; i < n; ++i) {
            std::vector<Expr> row;
            for (int k = 0; k < n; ++k)
                if (k != j) row.push_back(a[i][k]);
            minor.push_back(row);
        }
        Expr t = a[0][j] * determinant(minor);
        r += j % 2 ? -t : t;
    }
    return r;
}

// Z components of the canonical lift of eta, given eta and eta^{-1} on Y
std::vector<Expr> lift_components(const JetBundle& jb, const std::vector<Expr>& eta, const std::vector<Expr>& inv) {
    const int n1 = jb.base_dim();
    const Chart& Y = *jb.Y();
    for (int mu = 0; mu < n1; ++mu) require_fiber_free(jb, eta[mu], "base map");
    // dX[nu][mu] = d_mu eta_X^nu at x
    std::vector<std::vector<Expr>> dX(n1, std::vector<Expr>(n1));
    for (int nu = 0; nu < n1; ++nu)
        for (int mu = 0; mu < n1; ++mu) dX[nu][mu] = partial(eta[nu], Y, mu);
    Expr Jinv = pow(determinant(dX), -1);
    // derivatives of eta^{-1} evaluated at eta(x, y)
    std::unordered_map<SymbolId, Expr> at_image;
    for (int i = 0; i < Y.dim(); ++i) at_image.emplace(Y.coord(i), eta[i]);
    auto dinv = [&](int comp, int coord) { return substitute(partial(inv[comp], Y, coord), at_image); };

    std::vector<Expr> out(eta.begin(), eta.begin() + Y.dim());
    Expr pz = Expr::sym(jb.p());
    for (int A = 0; A < jb.fiber_dim(); ++A) {
        if (!jb.variational(A)) continue;
        for (int nu = 0; nu < n1; ++nu) {
            Expr a = dinv(n1 + A, nu);
            if (a.is_zero()) continue;
            for (int mu = 0; mu < n1; ++mu) pz += a * Expr::sym(jb.mom(A, mu)) * dX[nu][mu];
        }
    }
    out.push_back(pz * Jinv);
    for (int A = 0; A < jb.fiber_dim(); ++A) {
        if (!jb.variational(A)) continue;
        for (int mu = 0; mu < n1; ++mu) {
            Expr c;
            for (int B = 0; B < jb.fiber_dim(); ++B) {
                if (!jb.variational(B)) continue;
                Expr b = dinv(n1 + B, n1 + A);
                if (b.is_zero()) continue;
                for (int nu = 0; nu < n1; ++nu) c += b * Expr::sym(jb.mom(B, nu)) * dX[mu][nu];
            }
            out.push_back(c * Jinv);
        }
    }
    return out;
}

}  // namespace

VectorField prolong_vector(const JetBundle& jb, const VectorField& V) {
    require_chart(V, jb.Y());
    require_projectable(jb, V);
    const int n1 = jb.base_dim();
    std::vector<Expr> comps = V.components();
    std::vector<std::vector<Expr>> DV(n1, std::vector<Expr>(n1));  // DV[mu][nu] = d_mu V^nu
    for (int mu = 0; mu < n1; ++mu)
        for (int nu = 0; nu < n1; ++nu) DV[mu][nu] = total_derivative(jb, V[nu], mu);
    for (int A = 0; A < jb.fiber_dim(); ++A) {
        if (!jb.variational(A)) continue;
        for (int mu = 0; mu < n1; ++mu) {
            Expr c = total_derivative(jb, V[n1 + A], mu);
            for (int nu = 0; nu < n1; ++nu)
                if (!DV[mu][nu].is_zero()) c -= Expr::sym(jb.v(A, nu)) * DV[mu][nu];
            comps.push_back(c);
        }
    }
    return VectorField(jb.J1Y(), comps);
}

ChartMap prolong_automorphism(const JetBundle& jb, const ChartMap& eta) {
    require_map_on(eta, jb.Y());
    if (!eta.inverse) throw MissingInverse("prolongation needs the inverse automorphism");
    ChartMap m{jb.J1Y(), jb.J1Y(), prolong_components(jb, eta.components, *eta.inverse), std::nullopt, {}};
    m.inverse = prolong_components(jb, *eta.inverse, eta.components);
    return m;
}

DiffForm canonical_theta(const JetBundle& jb) {
    const ChartPtr& Z = jb.Z();
    const int n1 = jb.base_dim();
    DiffForm t = Expr::sym(jb.p()) * volume(Z);
    for (int A = 0; A < jb.fiber_dim(); ++A) {
        if (!jb.variational(A)) continue;
        DiffForm dy = DiffForm::dcoord(Z, n1 + A);
        for (int mu = 0; mu < n1; ++mu) t += Expr::sym(jb.mom(A, mu)) * wedge(dy, volume_n(Z, mu));
    }
    return t;
}

DiffForm canonical_omega(const JetBundle& jb) { return -exterior_d(canonical_theta(jb)); }

VectorField lift_vector_to_Z(const JetBundle& jb, const VectorField& V) {
    require_chart(V, jb.Y());
    require_projectable(jb, V);
    const Chart& Y = *jb.Y();
    const int n1 = jb.base_dim();
    std::vector<Expr> comps = V.components();
    Expr div;
    for (int nu = 0; nu < n1; ++nu) div += partial(V[nu], Y, nu);
    auto P = [&](int A, int mu) { return Expr::sym(jb.mom(A, mu)); };

    Expr pc = -(Expr::sym(jb.p()) * div);
    for (int B = 0; B < jb.fiber_dim(); ++B) {
        if (!jb.variational(B)) continue;
        for (int nu = 0; nu < n1; ++nu) pc -= P(B, nu) * partial(V[n1 + B], Y, nu);
    }
    comps.push_back(pc);
    for (int A = 0; A < jb.fiber_dim(); ++A) {
        if (!jb.variational(A)) continue;
        for (int mu = 0; mu < n1; ++mu) {
            Expr c = -(P(A, mu) * div);
            for (int nu = 0; nu < n1; ++nu) c += P(A, nu) * partial(V[mu], Y, nu);
            for (int B = 0; B < jb.fiber_dim(); ++B)
                if (jb.variational(B)) c -= P(B, mu) * diff(V[n1 + B], jb.y(A));
            comps.push_back(c);
        }
    }
    return VectorField(jb.Z(), comps);
}

ChartMap lift_automorphism_to_Z(const JetBundle& jb, const ChartMap& eta) {
    require_map_on(eta, jb.Y());
    if (!eta.inverse) throw MissingInverse("the canonical lift needs the inverse automorphism");
    ChartMap m{jb.Z(), jb.Z(), lift_components(jb, eta.components, *eta.inverse), std::nullopt, {}};
    m.inverse = lift_components(jb, *eta.inverse, eta.components);
    return m;
}

Expr dual_pairing(const JetBundle& jb, const std::vector<Expr>& z, const std::vector<Expr>& gamma) {
    const Chart& Z = *jb.Z();
    const Chart& J = *jb.J1Y();
    if (int(z.size()) != Z.dim() || int(gamma.size()) != J.dim())
        throw std::invalid_argument("dual_pairing: point has the wrong number of components");
    Expr r = z[Z.index_of(jb.p())];
    for (int A = 0; A < jb.fiber_dim(); ++A) {
        if (!jb.variational(A)) continue;
        for (int mu = 0; mu < jb.base_dim(); ++mu)
            r += z[Z.index_of(jb.mom(A, mu))] * gamma[J.index_of(jb.v(A, mu))];
    }
    return r;
}

VectorField extend(const VectorField& V, const ChartPtr& to) {
    std::vector<Expr> comps(to->dim());
    const Chart& from = *V.chart();
    for (int i = 0; i < from.dim(); ++i) {
        int j = to->index_of(from.coord(i));
        if (j < 0) {
            if (!V[i].is_zero()) throw ChartMismatch("cannot extend: " + display_name(from.coord(i)) + " missing");
            continue;
        }
        comps[j] = V[i];
    }
    return VectorField(to, comps);
}

}  // namespace mfc
