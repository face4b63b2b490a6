#include <Eigen/Dense>

#include <set>

#include "mfc/symmetry.hpp"

namespace mfc {

namespace {

std::vector<Expr> y_components(const GeneratorFamily& g) {
    std::vector<Expr> c = g.base;
    c.insert(c.end(), g.fiber.begin(), g.fiber.end());
    return c;
}

// i_v a, with the (-1)-form of a 0-form taken as zero
DiffForm contract(const VectorField& v, const DiffForm& a) {
    if (a.degree() == 0) return DiffForm(a.chart(), 0);
    return interior(v, a);
}

Expr coefficient_of_volume(const DiffForm& f) {
    const int n1 = f.chart()->base_dim();
    std::vector<int> idx(n1);
    for (int i = 0; i < n1; ++i) idx[i] = i;
    return f.coeff(idx);
}

std::vector<Expr> generic_components(const JetBundle& jb, const SymbolicSection& phi) {
    if (int(phi.components.size()) != jb.fiber_dim())
        throw std::invalid_argument("section has the wrong number of components");
    return phi.components;
}

// xdep atoms (jet parameters and their jets) appearing in e
std::vector<SymbolId> parameter_atoms(const Expr& e) {
    std::vector<SymbolId> r;
    for (SymbolId a : atoms_of(e))
        if (!is_sqrt_atom(a) && desc(a).xdep) r.push_back(a);
    return r;
}

}  // namespace

VectorField generator_on_Y(const JetBundle& jb, const GeneratorFamily& g) {
    if (int(g.base.size()) != jb.base_dim() || int(g.fiber.size()) != jb.fiber_dim())
        throw InvalidTheory("generator " + g.name + " does not match the bundle");
    VectorField v(jb.Y(), y_components(g));
    require_projectable(jb, v);
    return v;
}

VectorField generator_on_Y(const Theory& t, const GeneratorFamily& g) { return generator_on_Y(*t.bundle, g); }

GeneratorFamily rename_parameters(const GeneratorFamily& g, const std::string& tag) {
    std::set<std::string> fams;
    for (SymbolId p : g.params) fams.insert(desc(p).family);
    std::unordered_map<SymbolId, Expr> sub;
    auto renamed = [&](SymbolId s) {
        SymbolDesc d = desc(s);
        d.family += tag;
        return intern(std::move(d));
    };
    auto visit = [&](const Expr& e) {
        for (SymbolId a : atoms_of(e))
            if (!is_sqrt_atom(a) && desc(a).xdep && fams.count(desc(a).family)) sub.emplace(a, Expr::sym(renamed(a)));
    };
    for (const auto& c : g.base) visit(c);
    for (const auto& c : g.fiber) visit(c);
    GeneratorFamily r{g.name + tag, {}, {}, {}};
    for (const auto& c : g.base) r.base.push_back(substitute(c, sub));
    for (const auto& c : g.fiber) r.fiber.push_back(substitute(c, sub));
    for (SymbolId p : g.params) r.params.push_back(renamed(p));
    return r;
}

GeneratorFamily zero_generator(const JetBundle& jb) {
    return {"zero", std::vector<Expr>(jb.base_dim()), std::vector<Expr>(jb.fiber_dim()), {}};
}

GeneratorFamily algebra_bracket(const JetBundle& jb, const GeneratorFamily& a, const GeneratorFamily& b) {
    VectorField v = bracket(generator_on_Y(jb, b), generator_on_Y(jb, a));
    GeneratorFamily r{"[" + a.name + "," + b.name + "]", {}, {}, a.params};
    r.params.insert(r.params.end(), b.params.begin(), b.params.end());
    for (int i = 0; i < jb.Y()->dim(); ++i) (i < jb.base_dim() ? r.base : r.fiber).push_back(v[i]);
    return r;
}

Expr variation_of_L(const Theory& t, const GeneratorFamily& g) {
    const JetBundle& jb = *t.bundle;
    VectorField xi = generator_on_Y(jb, g);
    const int n1 = jb.base_dim();
    const Expr& L = t.L;
    Expr r;
    for (int mu = 0; mu < n1; ++mu) {
        if (xi[mu].is_zero()) continue;
        r += diff(L, jb.x(mu)) * xi[mu];
        r += L * total_derivative(jb, xi[mu], mu);
    }
    for (int A = 0; A < jb.fiber_dim(); ++A)
        if (!xi[n1 + A].is_zero()) r += diff(L, jb.y(A)) * xi[n1 + A];
    for (int A : jb.variational_fibers())
        for (int mu = 0; mu < n1; ++mu) {
            Expr pa = diff(L, jb.v(A, mu));
            if (pa.is_zero()) continue;
            Expr c = total_derivative(jb, xi[n1 + A], mu);
            for (int nu = 0; nu < n1; ++nu)
                if (!xi[nu].is_zero()) c -= Expr::sym(jb.v(A, nu)) * total_derivative(jb, xi[nu], mu);
            r += pa * c;
        }
    return r;
}

DiffForm covariant_momentum_map(const JetBundle& jb, const VectorField& xi) {
    const ChartPtr& Z = jb.Z();
    const int n1 = jb.base_dim();
    DiffForm J(Z, n1 - 1);
    for (int mu = 0; mu < n1; ++mu) {
        Expr c = Expr::sym(jb.p()) * xi[mu];
        for (int A : jb.variational_fibers()) c += Expr::sym(jb.mom(A, mu)) * xi[n1 + A];
        J += c * volume_n(Z, mu);
    }
    if (n1 < 2) return J;
    for (int A : jb.variational_fibers()) {
        DiffForm dy = DiffForm::dcoord(Z, n1 + A);
        for (int mu = 0; mu < n1; ++mu)
            for (int nu = 0; nu < n1; ++nu)
                if (nu != mu && !xi[nu].is_zero())
                    J += (-(Expr::sym(jb.mom(A, mu)) * xi[nu])) * wedge(dy, volume_nm1(Z, mu, nu));
    }
    return J;
}

DiffForm covariant_momentum_map(const Theory& t, const GeneratorFamily& g) {
    return covariant_momentum_map(*t.bundle, generator_on_Y(t, g));
}

DiffForm momentum_map_contraction(const JetBundle& jb, const VectorField& xi) {
    return contract(lift_vector_to_Z(jb, xi), canonical_theta(jb));
}

DiffForm lagrangian_momentum_map(const Theory& t, const GeneratorFamily& g) {
    const JetBundle& jb = *t.bundle;
    VectorField xi = generator_on_Y(jb, g);
    const ChartPtr& J1 = jb.J1Y();
    const int n1 = jb.base_dim();
    Expr p = t.L;
    std::map<std::pair<int, int>, Expr> P;
    for (int A : jb.variational_fibers())
        for (int mu = 0; mu < n1; ++mu) {
            Expr pa = diff(t.L, jb.v(A, mu));
            if (pa.is_zero()) continue;
            p -= pa * Expr::sym(jb.v(A, mu));
            P.emplace(std::make_pair(A, mu), pa);
        }
    DiffForm J(J1, n1 - 1);
    for (int mu = 0; mu < n1; ++mu) {
        Expr c = p * xi[mu];
        for (auto& [k, pa] : P)
            if (k.second == mu) c += pa * xi[n1 + k.first];
        J += c * volume_n(J1, mu);
    }
    if (n1 < 2) return J;
    for (auto& [k, pa] : P) {
        auto [A, mu] = k;
        for (int nu = 0; nu < n1; ++nu)
            if (nu != mu && !xi[nu].is_zero())
                J += (-(pa * xi[nu])) * wedge(DiffForm::dcoord(J1, n1 + A), volume_nm1(J1, mu, nu));
    }
    return J;
}

DiffForm lagrangian_momentum_map_pullback(const Theory& t, const GeneratorFamily& g) {
    return pullback(legendre(*t.bundle, t.L).map, covariant_momentum_map(t, g));
}

DiffForm lagrangian_momentum_map_contraction(const Theory& t, const GeneratorFamily& g) {
    const JetBundle& jb = *t.bundle;
    return contract(prolong_vector(jb, generator_on_Y(jb, g)), cartan_form(jb, t.L));
}

std::vector<Expr> lie_derivative_of_section(const JetBundle& jb, const SymbolicSection& phi,
                                            const GeneratorFamily& g) {
    VectorField xi = generator_on_Y(jb, g);
    auto comps = generic_components(jb, phi);
    const int n1 = jb.base_dim();
    std::unordered_map<SymbolId, Expr> at_phi;
    for (int A = 0; A < jb.fiber_dim(); ++A) at_phi.emplace(jb.y(A), comps[A]);
    std::vector<Expr> r;
    for (int A = 0; A < jb.fiber_dim(); ++A) {
        Expr c = -substitute(xi[n1 + A], at_phi);
        for (int nu = 0; nu < n1; ++nu)
            if (!xi[nu].is_zero()) c += partial(comps[A], *jb.X(), nu) * xi[nu];
        r.push_back(c);
    }
    return r;
}

DiffForm noether_current(const Theory& t, const GeneratorFamily& g, const SymbolicSection& phi) {
    return pullback(prolong_section(*t.bundle, phi, 1), lagrangian_momentum_map(t, g));
}

DiffForm noether_current_lie_form(const Theory& t, const GeneratorFamily& g, const SymbolicSection& phi) {
    const JetBundle& jb = *t.bundle;
    VectorField xi = generator_on_Y(jb, g);
    const int n1 = jb.base_dim();
    ChartMap j1 = prolong_section(jb, phi, 1);
    auto lie = lie_derivative_of_section(jb, phi, g);
    Expr Lphi = j1.pull(t.L);
    DiffForm cur(jb.X(), n1 - 1);
    for (int mu = 0; mu < n1; ++mu) {
        Expr c = Lphi * xi[mu];
        for (int A : jb.variational_fibers()) {
            Expr pa = diff(t.L, jb.v(A, mu));
            if (!pa.is_zero()) c -= j1.pull(pa) * lie[A];
        }
        cur += c * volume_n(jb.X(), mu);
    }
    return cur;
}

DivergenceIdentity noether_divergence_identity(const Theory& t, const GeneratorFamily& g) {
    const JetBundle& jb = *t.bundle;
    SymbolicSection phi = generic_section(jb);
    DivergenceIdentity r;
    r.lhs = coefficient_of_volume(exterior_d(noether_current(t, g, phi)));
    auto lie = lie_derivative_of_section(jb, phi, g);
    auto el = euler_lagrange(jb, t.L);
    auto var = jb.variational_fibers();
    std::size_t k = 0;
    for (int A = 0; A < jb.fiber_dim(); ++A) {
        Expr dA = jb.variational(A) ? el[k++] : diff(t.L, jb.y(A));
        if (!lie[A].is_zero() && !dA.is_zero()) r.rhs += dA * lie[A];
    }
    r.rhs += variation_of_L(t, g);
    r.residual = r.lhs - r.rhs;
    return r;
}

DiffForm momentum_bracket(const Theory& t, const GeneratorFamily& a, const GeneratorFamily& b) {
    const JetBundle& jb = *t.bundle;
    VectorField xa = lift_vector_to_Z(jb, generator_on_Y(jb, a));
    VectorField xb = lift_vector_to_Z(jb, generator_on_Y(jb, b));
    return interior(xb, interior(xa, canonical_omega(jb)));
}

BracketIdentity momentum_bracket_identity(const Theory& t, const GeneratorFamily& a, const GeneratorFamily& b) {
    const JetBundle& jb = *t.bundle;
    VectorField xa = lift_vector_to_Z(jb, generator_on_Y(jb, a));
    VectorField xb = lift_vector_to_Z(jb, generator_on_Y(jb, b));
    BracketIdentity r{momentum_bracket(t, a, b), DiffForm(jb.Z(), 0), DiffForm(jb.Z(), 0), DiffForm(jb.Z(), 0)};
    DiffForm ii = contract(xa, contract(xb, canonical_theta(jb)));
    r.exact = jb.base_dim() >= 2 ? exterior_d(ii) : DiffForm(jb.Z(), r.bracket.degree());
    r.commutator = covariant_momentum_map(t, algebra_bracket(jb, a, b));
    r.residual = r.bracket - r.exact - r.commutator;
    return r;
}

DiffForm equivariance_infinitesimal(const Theory& t, const GeneratorFamily& a, const GeneratorFamily& b) {
    const JetBundle& jb = *t.bundle;
    VectorField zb = lift_vector_to_Z(jb, generator_on_Y(jb, b));
    return lie_derivative(zb, covariant_momentum_map(t, a)) - covariant_momentum_map(t, algebra_bracket(jb, a, b));
}

std::vector<Expr> legendre_equivariance_check(const Theory& t, const GeneratorFamily& g) {
    const JetBundle& jb = *t.bundle;
    VectorField xi = generator_on_Y(jb, g);
    VectorField xz = lift_vector_to_Z(jb, xi);
    VectorField xj = prolong_vector(jb, xi);
    LegendreResult fl = legendre(jb, t.L);
    std::vector<Expr> r;
    for (int i = 0; i < jb.Z()->dim(); ++i) r.push_back(fl.map.pull(xz[i]) - xj.apply(fl.map.components[i]));
    return r;
}

DiffForm cartan_invariance_check(const Theory& t, const GeneratorFamily& g) {
    const JetBundle& jb = *t.bundle;
    return lie_derivative(prolong_vector(jb, generator_on_Y(jb, g)), cartan_form(jb, t.L));
}

TransitivityResult vertical_transitivity(const Theory& t, int n_samples, std::uint64_t seed) {
    const JetBundle& jb = *t.bundle;
    const int n1 = jb.base_dim(), k = jb.fiber_dim();
    // columns: d xi^A / d(parameter jet) for every generator and parameter jet of order <= 1
    std::vector<std::vector<Expr>> cols;
    for (const auto& g : t.generators) {
        VectorField xi = generator_on_Y(jb, g);
        std::set<SymbolId> ps;
        for (int A = 0; A < k; ++A)
            for (SymbolId a : parameter_atoms(xi[n1 + A]))
                if (desc(a).jet.size() <= 1) ps.insert(a);
        for (SymbolId p : ps) {
            std::vector<Expr> c;
            for (int A = 0; A < k; ++A) c.push_back(diff(xi[n1 + A], p));
            cols.push_back(c);
        }
    }
    TransitivityResult res;
    res.verdict = true;
    res.rank = k;
    std::mt19937_64 rng(seed);
    std::vector<Expr> all;
    for (auto& c : cols) all.insert(all.end(), c.begin(), c.end());
    std::vector<SymbolId> extra = jb.Y()->coords();
    for (int s = 0; s < n_samples; ++s) {
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(k, std::max<std::size_t>(cols.size(), 1));
        Assignment a = sample_assignment(all, rng, extra);
        for (std::size_t j = 0; j < cols.size(); ++j)
            for (int A = 0; A < k; ++A) M(A, j) = eval_numeric(cols[j][A], a);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
        lu.setThreshold(1e-9);
        int rank = int(lu.rank());
        if (rank < res.rank) res.rank = rank;
        if (rank < k && res.verdict) {
            res.verdict = false;
            Eigen::FullPivLU<Eigen::MatrixXd> lt(M.transpose());
            lt.setThreshold(1e-9);
            Eigen::MatrixXd ker = lt.kernel();
            Eigen::VectorXd w = ker.col(0).normalized();
            res.witness.assign(w.data(), w.data() + w.size());
        }
    }
    return res;
}

std::map<std::pair<int, int>, Expr> stress_energy_from_parametric_metric(const Theory& t) {
    if (t.meta.metric != MetricKind::Parametric)
        throw NoParametricMetric("theory " + t.name + " has no parametric metric field");
    const JetBundle& jb = *t.bundle;
    int f = jb.field_index(t.meta.metric_field);
    std::map<std::pair<int, int>, Expr> T;
    for (int A : jb.field_fibers(f)) {
        const SymbolDesc& d = desc(jb.y(A));
        int s = d.comp[0], r = d.comp[1];
        // coordinate derivative = (2 - delta) * symmetric derivative; T = 2 * symmetric
        Expr c = diff(t.L, jb.y(A));
        T.emplace(std::make_pair(s, r), s == r ? Expr(2) * c : c);
    }
    return T;
}

std::vector<bool> forced_unknowns(const std::vector<Expr>& equations, const std::vector<SymbolId>& unknowns,
                                  int n_samples, std::uint64_t seed) {
    const int k = int(unknowns.size());
    std::vector<bool> forced(k, true);
    std::vector<Expr> coeff;
    for (const auto& e : equations)
        for (SymbolId u : unknowns) coeff.push_back(diff(e, u));
    std::mt19937_64 rng(seed);
    for (int s = 0; s < n_samples; ++s) {
        Assignment a = sample_assignment(coeff, rng);
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(std::max<std::size_t>(equations.size(), 1), k);
        for (std::size_t i = 0; i < equations.size(); ++i)
            for (int B = 0; B < k; ++B) M(i, B) = eval_numeric(coeff[i * k + B], a);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
        lu.setThreshold(1e-9);
        if (lu.rank() == k) continue;
        Eigen::MatrixXd ker = lu.kernel();
        for (int B = 0; B < k; ++B)
            if (ker.row(B).norm() > 1e-9) forced[B] = false;
    }
    return forced;
}

ConverseExtraction converse_noether(const Theory& t, const GeneratorFamily& g, int n_samples, std::uint64_t seed) {
    const JetBundle& jb = *t.bundle;
    SymbolicSection phi = generic_section(jb);
    auto lie = lie_derivative_of_section(jb, phi, g);
    ConverseExtraction r;
    Expr rhs;
    for (int A = 0; A < jb.fiber_dim(); ++A) {
        r.unknowns.push_back(free_symbol("E", {A}));
        rhs += Expr::sym(r.unknowns.back()) * lie[A];
    }
    rhs += variation_of_L(t, g);
    std::unordered_map<SymbolId, Expr> none;
    for (SymbolId u : r.unknowns) none.emplace(u, Expr());
    for (auto& [m, c] : collect(rhs, parameter_atoms(rhs))) {
        if (m.empty()) continue;
        // drop an inhomogeneous part that vanishes only modulo metric identities
        Expr c0 = substitute(c, none);
        if (!c0.is_zero() && equal_symbolic(c0, Expr())) c -= c0;
        if (!c.is_zero()) r.equations.push_back(c);
    }

    r.forced = forced_unknowns(r.equations, r.unknowns, n_samples, seed);
    return r;
}

ConverseStages converse_stages(const Theory& t, const ConverseExtraction& ce, int n_samples, std::uint64_t seed) {
    const JetBundle& jb = *t.bundle;
    ConverseStages r;
    std::vector<Expr> mixed;
    for (const auto& e : ce.equations) {
        std::set<int> fields;
        for (std::size_t A = 0; A < ce.unknowns.size(); ++A)
            if (depends_on(e, ce.unknowns[A])) fields.insert(jb.field_of(int(A)));
        (fields.size() <= 1 ? r.single_field : mixed).push_back(e);
    }
    r.forced_single = forced_unknowns(r.single_field, ce.unknowns, n_samples, seed);
    std::unordered_map<SymbolId, Expr> pinned;
    for (std::size_t A = 0; A < ce.unknowns.size(); ++A)
        if (r.forced_single[A]) pinned.emplace(ce.unknowns[A], Expr());
    for (const auto& e : mixed) {
        Expr c = substitute(e, pinned);
        if (!c.is_zero()) r.contracted.push_back(c);
    }
    return r;
}

}  // namespace mfc
