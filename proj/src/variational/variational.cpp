#include "mfc/variational.hpp"

namespace mfc {

const GeneratorFamily& Theory::generator(const std::string& n) const {
    for (const auto& g : generators)
        if (g.name == n) return g;
    throw std::out_of_range("theory " + name + " has no generator '" + n + "'");
}

void validate_lagrangian(const JetBundle& jb, const Expr& L) {
    const Chart& J = *jb.J1Y();
    for (SymbolId s : free_symbols(L)) {
        if (J.has(s)) continue;
        const SymbolDesc& d = desc(s);
        // jets of parametric fields are background data
        if (d.field && !d.variational && !d.jet.empty()) continue;
        switch (d.kind) {
            case SymKind::Multimomentum:
            case SymKind::CovHamiltonian:
                throw InvalidLagrangian("Lagrangian contains the Z coordinate " + display_name(s));
            case SymKind::SecondMultivelocity:
                throw InvalidLagrangian("Lagrangian contains the second jet " + display_name(s));
            case SymKind::BaseCoord:
            case SymKind::FiberCoord:
            case SymKind::Multivelocity:
            case SymKind::Metric:
                throw InvalidLagrangian("Lagrangian contains " + display_name(s) + ", not a J1Y coordinate");
            default:
                break;
        }
    }
}

void validate(const Theory& t) {
    if (!t.bundle) throw InvalidTheory("theory " + t.name + " has no bundle");
    const JetBundle& jb = *t.bundle;
    validate_lagrangian(jb, t.L);
    for (const auto& g : t.generators) {
        if (int(g.base.size()) != jb.base_dim() || int(g.fiber.size()) != jb.fiber_dim())
            throw InvalidTheory("generator " + g.name + " does not match the bundle");
        for (SymbolId s : g.params)
            if (jb.J2Y()->has(s) || jb.Z()->has(s))
                throw InvalidTheory("generator " + g.name + " parameter " + display_name(s) + " is a chart symbol");
        std::vector<Expr> comps = g.base;
        comps.insert(comps.end(), g.fiber.begin(), g.fiber.end());
        require_projectable(jb, VectorField(jb.Y(), comps));
    }
    const auto& m = t.meta;
    if (m.metric == MetricKind::Parametric || m.metric == MetricKind::Variational) {
        int f = jb.field_index(m.metric_field);
        if (f < 0) throw InvalidTheory("metric field '" + m.metric_field + "' is not declared");
        const FieldSpec& fs = jb.spec().fields[f];
        if (fs.index != IndexStructure::Sym2) throw InvalidTheory("metric field '" + m.metric_field + "' is not sym2");
        if (fs.variational != (m.metric == MetricKind::Variational))
            throw InvalidTheory("metric field '" + m.metric_field + "' has the wrong variational flag");
    } else if (!m.metric_field.empty()) {
        throw InvalidTheory("metric field given for a theory without a field metric");
    }
    if (m.parametrized && m.metric == MetricKind::Fixed)
        throw InvalidTheory("a parametrized theory cannot have a fixed background metric");
}

namespace {

Expr dL_dv(const JetBundle& jb, const Expr& L, int A, int mu) { return diff(L, jb.v(A, mu)); }

Expr coefficient_of_volume(const DiffForm& f) {
    const int n1 = f.chart()->base_dim();
    if (f.degree() != n1) throw std::logic_error("expected a top form on the base");
    std::vector<int> idx(n1);
    for (int i = 0; i < n1; ++i) idx[i] = i;
    return f.coeff(idx);
}

}  // namespace

LegendreResult legendre(const JetBundle& jb, const Expr& L) {
    validate_lagrangian(jb, L);
    const int n1 = jb.base_dim();
    LegendreResult r{{}, L, ChartMap{jb.J1Y(), jb.Z(), {}, std::nullopt, {}}};
    for (int A : jb.variational_fibers())
        for (int mu = 0; mu < n1; ++mu) {
            Expr pa = dL_dv(jb, L, A, mu);
            r.p -= pa * Expr::sym(jb.v(A, mu));
            r.momenta.emplace(jb.mom(A, mu), pa);
        }
    for (SymbolId s : jb.Z()->coords()) {
        if (s == jb.p())
            r.map.components.push_back(r.p);
        else if (auto it = r.momenta.find(s); it != r.momenta.end())
            r.map.components.push_back(it->second);
        else
            r.map.components.push_back(Expr::sym(s));
    }
    return r;
}

DiffForm cartan_form(const JetBundle& jb, const Expr& L) {
    const ChartPtr& J = jb.J1Y();
    const int n1 = jb.base_dim();
    Expr p = L;
    DiffForm t(J, n1);
    for (int A : jb.variational_fibers()) {
        DiffForm dy = DiffForm::dcoord(J, n1 + A);
        for (int mu = 0; mu < n1; ++mu) {
            Expr pa = dL_dv(jb, L, A, mu);
            if (pa.is_zero()) continue;
            p -= pa * Expr::sym(jb.v(A, mu));
            t += pa * wedge(dy, volume_n(J, mu));
        }
    }
    return t + p * volume(J);
}

DiffForm cartan_form_pullback(const JetBundle& jb, const Expr& L) {
    return pullback(legendre(jb, L).map, canonical_theta(jb));
}

DiffForm cartan_form_contact(const JetBundle& jb, const Expr& L) {
    const ChartPtr& J = jb.J1Y();
    const int n1 = jb.base_dim();
    DiffForm t = L * volume(J);
    for (int A : jb.variational_fibers()) {
        for (int mu = 0; mu < n1; ++mu) {
            Expr pa = dL_dv(jb, L, A, mu);
            if (pa.is_zero()) continue;
            DiffForm contact = DiffForm::dcoord(J, n1 + A);
            for (int nu = 0; nu < n1; ++nu) contact += (-Expr::sym(jb.v(A, nu))) * DiffForm::dcoord(J, nu);
            t += pa * wedge(contact, volume_n(J, mu));
        }
    }
    return t;
}

DiffForm omega_L(const JetBundle& jb, const Expr& L) { return -exterior_d(cartan_form(jb, L)); }

std::vector<Expr> euler_lagrange(const JetBundle& jb, const Expr& L) {
    validate_lagrangian(jb, L);
    std::vector<Expr> r;
    for (int A : jb.variational_fibers()) {
        Expr e = diff(L, jb.y(A));
        for (int mu = 0; mu < jb.base_dim(); ++mu) e -= total_derivative(jb, dL_dv(jb, L, A, mu), mu);
        r.push_back(e);
    }
    return r;
}

namespace {

void require_vertical(const JetBundle& jb, const VectorField& V) {
    if (!(*V.chart() == *jb.Y())) throw ChartMismatch("expected a vector field on Y");
    for (int mu = 0; mu < jb.base_dim(); ++mu)
        if (!V[mu].is_zero()) throw std::invalid_argument("vector field is not vertical");
}

}  // namespace

Expr el_via_cartan(const JetBundle& jb, const Expr& L, const SymbolicSection& phi, const VectorField& V) {
    require_vertical(jb, V);
    DiffForm f = interior(prolong_vector(jb, V), omega_L(jb, L));
    return coefficient_of_volume(pullback(prolong_section(jb, phi, 1), f));
}

Expr el_residual_contraction(const JetBundle& jb, const Expr& L, const SymbolicSection& phi,
                             const VectorField& V) {
    require_vertical(jb, V);
    ChartMap j2 = prolong_section(jb, phi, 2);
    auto el = euler_lagrange(jb, L);
    auto var = jb.variational_fibers();
    Expr r;
    for (std::size_t a = 0; a < var.size(); ++a) {
        const Expr& VA = V[jb.base_dim() + var[a]];
        if (VA.is_zero() || el[a].is_zero()) continue;
        r -= j2.pull(VA * el[a]);
    }
    return r;
}

Expr lagrangian_reconstruction(const JetBundle& jb, const Expr& L, const SymbolicSection& phi) {
    return coefficient_of_volume(pullback(prolong_section(jb, phi, 1), cartan_form(jb, L)));
}

Expr lemma32_check(const JetBundle& jb, const Expr& L, const SymbolicSection& phi, const VectorField& W) {
    if (!(*W.chart() == *jb.J1Y())) throw ChartMismatch("expected a vector field on J1Y");
    const int n1 = jb.base_dim();
    ChartMap j1 = prolong_section(jb, phi, 1);
    // along the image, the Y-part of W must be T(phi).w with w = (W^mu)
    for (int A = 0; A < jb.fiber_dim(); ++A) {
        Expr tangent;
        for (int mu = 0; mu < n1; ++mu) tangent += j1.pull(W[mu]) * partial(phi.components[A], *jb.X(), mu);
        if (!(j1.pull(W[n1 + A]) - tangent).is_zero())
            throw WNotInEitherClass("W is neither tangent to the image of j1(phi) nor vertical over Y (component " +
                                    display_name(jb.y(A)) + ")");
    }
    return coefficient_of_volume(pullback(j1, interior(W, omega_L(jb, L))));
}

}  // namespace mfc
