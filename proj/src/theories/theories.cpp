#include "mfc/theories.hpp"

namespace mfc {

const Expected& CatalogEntry::at(const std::string& key) const {
    auto it = expected.find(key);
    if (it == expected.end()) throw std::out_of_range(id + " has no expected object '" + key + "'");
    return it->second;
}

int levi_civita_sign(const std::vector<int>& idx) {
    int s = 1;
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = i + 1; j < idx.size(); ++j) {
            if (idx[i] == idx[j]) return 0;
            if (idx[i] > idx[j]) s = -s;
        }
    return s;
}

SymbolId relativistic_mass() { return free_symbol("m"); }
SymbolId gen_chi() { return jet_parameter("chi"); }
SymbolId gen_lambda() { return jet_parameter("lambda"); }
SymbolId gen_xi(int mu) { return jet_parameter("xi", {mu}, {true}); }

SymbolId gen_jet(SymbolId s, std::vector<int> idx) {
    for (int i : idx) s = jet_successor(s, i);
    return s;
}

SymbolId mechanics_lagrangian_symbol(int N) {
    auto jb = jet_charts({1, {{"q", IndexStructure::Scalar, true, N}}});
    SymbolDesc d;
    d.family = "L";
    d.kind = SymKind::DerivedScalar;
    d.rule = Rule::Function;
    d.args = jb->J1Y()->coords();
    return intern(std::move(d));
}

SymbolId target_metric_symbol(const JetBundle& jb, int A, int B) {
    SymbolDesc d;
    d.family = "G";
    d.kind = SymKind::DerivedScalar;
    d.rule = Rule::Function;
    d.comp = {A, B};
    d.comp_up = {false, false};
    d.comp_sym = true;
    int phi = jb.field_index("phi");
    for (int C : jb.field_fibers(phi)) d.args.push_back(jb.y(C));
    return intern(std::move(d));
}

namespace {

Expr S(SymbolId s) { return Expr::sym(s); }
Expr R(std::int64_t a, std::int64_t b = 1) { return Expr(Rational(a, b)); }

Expr chi_j(std::vector<int> idx) { return S(gen_jet(gen_chi(), std::move(idx))); }
Expr xi_j(int mu, std::vector<int> idx) { return S(gen_jet(gen_xi(mu), std::move(idx))); }

// spacetime metric: Minkowski numbers or the symbols of a metric field
struct Metric {
    std::string fam;  // empty: Minkowski
    int n = 0;
    Expr g(int a, int b) const {
        if (fam.empty()) return a != b ? Expr() : Expr(a == 0 ? -1 : 1);
        return S(metric_symbol(fam, a, b));
    }
    Expr gi(int a, int b) const {
        if (fam.empty()) return g(a, b);
        return S(inverse_metric_symbol(fam, a, b));
    }
    Expr sqrtg() const { return fam.empty() ? Expr(1) : S(sqrt_neg_det_symbol(fam)); }
};

std::vector<Expr> zero_vec(int n) { return std::vector<Expr>(n); }

// ---- particle mechanics --------------------------------------------------------------

GeneratorFamily reparametrization(const JetBundle& jb) {
    return {"reparam", {S(gen_chi())}, zero_vec(jb.fiber_dim()), {gen_chi()}};
}

}  // namespace

Theory make_particle_mechanics(int N) {
    if (N < 1) throw std::invalid_argument("particle mechanics needs N >= 1");
    auto jb = jet_charts({1, {{"q", IndexStructure::Scalar, true, N}}});
    Theory t{"particle_mechanics", jb, S(mechanics_lagrangian_symbol(N)), {reparametrization(*jb)}, {}};
    validate(t);
    return t;
}

CatalogEntry particle_mechanics_entry(int N) {
    CatalogEntry e{"particle_mechanics", make_particle_mechanics(N), {}};
    const JetBundle& jb = *e.theory.bundle;
    SymbolId L = mechanics_lagrangian_symbol(N);
    // argument positions: t, q^0..q^{N-1}, v^0..v^{N-1}
    auto dv = [&](int A) { return function_derivative(L, 1 + N + A); };
    Expr E = -S(L);
    std::vector<Expr> mom, el;
    for (int A = 0; A < N; ++A) {
        E += S(jb.v(A, 0)) * S(dv(A));
        mom.push_back(S(dv(A)));
        Expr dt = S(function_derivative(dv(A), 0));
        for (int B = 0; B < N; ++B) {
            dt += S(function_derivative(dv(A), 1 + B)) * S(jb.v(B, 0));
            dt += S(function_derivative(dv(A), 1 + N + B)) * S(jb.w(B, 0, 0));
        }
        el.push_back(S(function_derivative(L, 1 + A)) - dt);
    }
    DiffForm theta = (-E) * DiffForm::dcoord(jb.J1Y(), 0);
    for (int A = 0; A < N; ++A) theta += mom[A] * DiffForm::dcoord(jb.J1Y(), 1 + A);
    Expr chi = S(gen_chi());
    e.expected["legendre.momenta"] = mom;
    e.expected["legendre.p"] = -E;
    e.expected["cartan_form"] = theta;
    e.expected["euler_lagrange"] = el;
    e.expected["momentum_map.reparam"] = DiffForm::function(jb.Z(), S(jb.p()) * chi);
    e.expected["lagrangian_momentum_map.reparam"] = DiffForm::function(jb.J1Y(), -(E * chi));
    return e;
}

// ---- relativistic particle -----------------------------------------------------------

namespace {

Expr rel_norm(const JetBundle& jb) {
    Expr r;
    for (int A = 0; A < 4; ++A) r += (A == 0 ? R(1) : R(-1)) * S(jb.v(A, 0)) * S(jb.v(A, 0));
    return sqrt(r);
}

}  // namespace

Theory make_relativistic_particle() {
    auto jb = jet_charts({1, {{"q", IndexStructure::Scalar, true, 4}}});
    Theory t{"relativistic_particle", jb, -(S(relativistic_mass()) * rel_norm(*jb)), {reparametrization(*jb)}, {}};
    t.meta.parametrized = true;
    t.generators[0].symmetry = true;
    validate(t);
    return t;
}

CatalogEntry relativistic_particle_entry() {
    CatalogEntry e{"relativistic_particle", make_relativistic_particle(), {}};
    const JetBundle& jb = *e.theory.bundle;
    Expr m = S(relativistic_mass()), s = rel_norm(jb), si = pow(s, -1);
    auto eta = [](int A) { return A == 0 ? R(-1) : R(1); };
    Expr vw;
    for (int A = 0; A < 4; ++A) vw += eta(A) * S(jb.v(A, 0)) * S(jb.w(A, 0, 0));
    std::vector<Expr> mom, el;
    for (int A = 0; A < 4; ++A) {
        mom.push_back(m * eta(A) * S(jb.v(A, 0)) * si);
        // -m d/dt(eta v / |v|), with d|v|/dt = -eta(v, w)/|v|
        el.push_back(-(m * eta(A) * (S(jb.w(A, 0, 0)) * si + S(jb.v(A, 0)) * vw * pow(si, 3))));
    }
    e.expected["legendre.momenta"] = mom;
    e.expected["legendre.p"] = Expr();
    e.expected["euler_lagrange"] = el;
    e.expected["momentum_map.reparam"] = DiffForm::function(jb.Z(), S(jb.p()) * S(gen_chi()));
    e.expected["lagrangian_momentum_map.reparam"] = DiffForm::function(jb.J1Y(), Expr());
    return e;
}

// ---- electromagnetism ----------------------------------------------------------------

namespace {

// F_{mu nu} = A_{nu,mu} - A_{mu,nu}
Expr F_low(const JetBundle& jb, int mu, int nu) { return S(jb.v(nu, mu)) - S(jb.v(mu, nu)); }

Expr F_up(const JetBundle& jb, const Metric& g, int mu, int nu) {
    Expr r;
    for (int a = 0; a < jb.base_dim(); ++a)
        for (int b = 0; b < jb.base_dim(); ++b) {
            Expr f = F_low(jb, a, b);
            if (!f.is_zero()) r += g.gi(mu, a) * g.gi(nu, b) * f;
        }
    return r;
}

Expr F_squared(const JetBundle& jb, const Metric& g) {
    Expr r;
    for (int mu = 0; mu < jb.base_dim(); ++mu)
        for (int nu = 0; nu < jb.base_dim(); ++nu) r += F_low(jb, mu, nu) * F_up(jb, g, mu, nu);
    return r;
}

// A^{mu,nu} = g^{mu a} g^{nu b} A_{a,b}
Expr A_up_jet(const JetBundle& jb, const Metric& g, int mu, int nu) {
    Expr r;
    for (int a = 0; a < jb.base_dim(); ++a)
        for (int b = 0; b < jb.base_dim(); ++b) r += g.gi(mu, a) * g.gi(nu, b) * S(jb.v(a, b));
    return r;
}

// (xi, chi) acting on A_nu (and g_{sr} when present)
GeneratorFamily diffeo_gauge(const JetBundle& jb, const Metric& g) {
    const int n1 = jb.base_dim();
    GeneratorFamily gen{"diffeo_gauge", {}, zero_vec(jb.fiber_dim()), {gen_chi()}, true};
    for (int mu = 0; mu < n1; ++mu) {
        gen.base.push_back(S(gen_xi(mu)));
        gen.params.push_back(gen_xi(mu));
    }
    for (int nu = 0; nu < n1; ++nu) {
        Expr c = chi_j({nu});
        for (int mu = 0; mu < n1; ++mu) c -= S(jb.y(mu)) * xi_j(mu, {nu});
        gen.fiber[nu] = c;
    }
    if (!g.fam.empty()) {
        int f = jb.field_index(g.fam);
        for (int A : jb.field_fibers(f)) {
            const SymbolDesc& d = desc(jb.y(A));
            int s = d.comp[0], r = d.comp[1];
            Expr c;
            for (int mu = 0; mu < n1; ++mu) c -= g.g(s, mu) * xi_j(mu, {r}) + g.g(r, mu) * xi_j(mu, {s});
            gen.fiber[A] = c;
        }
    }
    return gen;
}

GeneratorFamily gauge(const JetBundle& jb) {
    GeneratorFamily gen{"gauge", zero_vec(jb.base_dim()), zero_vec(jb.fiber_dim()), {gen_chi()}, true};
    for (int nu = 0; nu < jb.base_dim(); ++nu) gen.fiber[nu] = chi_j({nu});
    return gen;
}

Metric maxwell_metric(bool fixed) { return fixed ? Metric{"", 4} : Metric{"g", 4}; }

}  // namespace

Theory make_maxwell(bool fixed_minkowski) {
    BundleSpec b{4, {{"A", IndexStructure::Covector, true}}};
    if (!fixed_minkowski) b.fields.push_back({"g", IndexStructure::Sym2, false, 1, 1});
    auto jb = jet_charts(b);
    Metric g = maxwell_metric(fixed_minkowski);
    Theory t{fixed_minkowski ? "maxwell" : "maxwell_parametrized", jb,
             scale(F_squared(*jb, g) * g.sqrtg(), Rational(-1, 4)),
             {gauge(*jb)},
             {}};
    if (fixed_minkowski) {
        t.meta.metric = MetricKind::Fixed;
    } else {
        t.generators.push_back(diffeo_gauge(*jb, g));
        t.meta = {true, MetricKind::Parametric, "g"};
    }
    validate(t);
    return t;
}

CatalogEntry maxwell_entry(bool fixed_minkowski) {
    CatalogEntry e{"", make_maxwell(fixed_minkowski), {}};
    e.id = e.theory.name;
    const JetBundle& jb = *e.theory.bundle;
    const int n1 = 4;
    Metric g = maxwell_metric(fixed_minkowski);
    const ChartPtr& J = jb.J1Y();
    const ChartPtr& Z = jb.Z();
    const ChartPtr& X = jb.X();
    Expr sg = g.sqrtg(), F2 = F_squared(jb, g);

    std::vector<Expr> mom;
    for (int nu = 0; nu < n1; ++nu)
        for (int mu = 0; mu < n1; ++mu) mom.push_back(F_up(jb, g, nu, mu) * sg);
    e.expected["legendre.momenta"] = mom;
    e.expected["legendre.p"] = scale(F2 * sg, Rational(1, 4));

    DiffForm theta = scale(F2 * sg, Rational(1, 4)) * volume(J);
    for (int nu = 0; nu < n1; ++nu)
        for (int mu = 0; mu < n1; ++mu)
            theta += (sg * F_up(jb, g, nu, mu)) * wedge(DiffForm::dcoord(J, n1 + nu), volume_n(J, mu));
    e.expected["cartan_form"] = theta;

    // -d Theta_L with g held fixed
    DiffForm omega(J, n1 + 2);
    for (int nu = 0; nu < n1; ++nu)
        for (int mu = 0; mu < n1; ++mu) {
            DiffForm dA = DiffForm::dcoord(J, n1 + nu);
            for (int r = 0; r < n1; ++r)
                for (int s = 0; s < n1; ++s) {
                    Expr c = sg * (g.gi(nu, s) * g.gi(mu, r) - g.gi(nu, r) * g.gi(mu, s));
                    if (c.is_zero()) continue;
                    DiffForm dv = DiffForm::dcoord(J, J->index_of(jb.v(r, s)));
                    omega += c * wedge(wedge(dA, dv), volume_n(J, mu));
                }
            DiffForm dv = DiffForm::dcoord(J, J->index_of(jb.v(nu, mu)));
            omega += (-(sg * F_up(jb, g, mu, nu))) * wedge(dv, volume(J));
        }
    e.expected[fixed_minkowski ? "omega_L" : "omega_L.dg_free"] = omega;

    if (fixed_minkowski) {
        // d_mu (A^{nu,mu} - A^{mu,nu})
        std::vector<Expr> el;
        for (int nu = 0; nu < n1; ++nu) {
            Expr r;
            for (int mu = 0; mu < n1; ++mu)
                for (int a = 0; a < n1; ++a)
                    for (int b = 0; b < n1; ++b)
                        r += g.gi(nu, a) * g.gi(mu, b) * (S(jb.w(a, b, mu)) - S(jb.w(b, a, mu)));
            el.push_back(r);
        }
        e.expected["euler_lagrange"] = el;
    }

    DiffForm J_gauge(Z, n1 - 1), JL_gauge(J, n1 - 1), N_gauge(X, n1 - 1);
    for (int nu = 0; nu < n1; ++nu)
        for (int mu = 0; mu < n1; ++mu) {
            J_gauge += (S(jb.mom(nu, mu)) * chi_j({nu})) * volume_n(Z, mu);
            JL_gauge += (F_up(jb, g, nu, mu) * sg * chi_j({nu})) * volume_n(J, mu);
            N_gauge += ((A_up_jet(jb, g, mu, nu) - A_up_jet(jb, g, nu, mu)) * sg * chi_j({nu})) * volume_n(X, mu);
        }
    e.expected["momentum_map.gauge"] = J_gauge;
    e.expected["lagrangian_momentum_map.gauge"] = JL_gauge;
    e.expected["noether_current.gauge"] = N_gauge;
    e.expected["variation_of_L.gauge"] = Expr();
    e.expected["vertical_transitivity"] = true;

    if (!fixed_minkowski) {
        DiffForm Jt(Z, n1 - 1);
        for (int mu = 0; mu < n1; ++mu) {
            Expr c = S(jb.p()) * xi_j(mu, {});
            for (int nu = 0; nu < n1; ++nu) {
                c += S(jb.mom(nu, mu)) * chi_j({nu});
                for (int tau = 0; tau < n1; ++tau) c -= S(jb.mom(nu, mu)) * S(jb.y(tau)) * xi_j(tau, {nu});
            }
            Jt += c * volume_n(Z, mu);
            for (int tau = 0; tau < n1; ++tau)
                for (int nu = 0; nu < n1; ++nu)
                    Jt += (-(S(jb.mom(tau, mu)) * xi_j(nu, {}))) *
                          wedge(DiffForm::dcoord(Z, n1 + tau), volume_nm1(Z, mu, nu));
        }
        e.expected["momentum_map.diffeo_gauge"] = Jt;
        e.expected["variation_of_L.diffeo_gauge"] = Expr();
        // -(1/4 g^{sr} F_ab F^ab + g^{rb} F^{as} F_ba) sqrt(-g), for s <= r
        std::vector<Expr> T;
        for (int s = 0; s < n1; ++s)
            for (int r = s; r < n1; ++r) {
                Expr c = scale(g.gi(s, r) * F2, Rational(1, 4));
                for (int a = 0; a < n1; ++a)
                    for (int b = 0; b < n1; ++b) c += g.gi(r, b) * F_up(jb, g, a, s) * F_low(jb, b, a);
                T.push_back(-(c * sg));
            }
        e.expected["stress_energy"] = T;
    }
    return e;
}

// ---- Chern-Simons --------------------------------------------------------------------

Theory make_chern_simons() {
    auto jb = jet_charts({3, {{"A", IndexStructure::Covector, true}}});
    Expr L;
    for (int mu = 0; mu < 3; ++mu)
        for (int nu = 0; nu < 3; ++nu)
            for (int s = 0; s < 3; ++s)
                if (int eps = levi_civita_sign({mu, nu, s}))
                    L += scale(F_low(*jb, mu, nu) * S(jb->y(s)), Rational(eps, 2));
    Theory t{"chern_simons", jb, L, {gauge(*jb), diffeo_gauge(*jb, Metric{"", 3})}, {}};
    t.meta.parametrized = true;
    validate(t);
    return t;
}

CatalogEntry chern_simons_entry() {
    CatalogEntry e{"chern_simons", make_chern_simons(), {}};
    const JetBundle& jb = *e.theory.bundle;
    const ChartPtr& J = jb.J1Y();
    const ChartPtr& Z = jb.Z();
    const ChartPtr& X = jb.X();
    const int n1 = 3;
    auto eps = [](int a, int b, int c) { return Expr(levi_civita_sign({a, b, c})); };
    auto A = [&](int s) { return S(jb.y(s)); };
    auto dA = [&](const ChartPtr& c, int s) { return DiffForm::dcoord(c, n1 + s); };

    std::vector<Expr> mom;
    for (int nu = 0; nu < n1; ++nu)
        for (int mu = 0; mu < n1; ++mu) {
            Expr c;
            for (int s = 0; s < n1; ++s) c += eps(mu, nu, s) * A(s);
            mom.push_back(c);
        }
    e.expected["legendre.momenta"] = mom;
    e.expected["legendre.p"] = Expr();

    DiffForm theta(J, n1), omega(J, n1 + 1);
    std::vector<Expr> el(n1);
    for (int mu = 0; mu < n1; ++mu)
        for (int nu = 0; nu < n1; ++nu)
            for (int s = 0; s < n1; ++s) {
                Expr ep = eps(mu, nu, s);
                if (ep.is_zero()) continue;
                theta += (ep * A(s)) * wedge(dA(J, nu), volume_n(J, mu));
                omega += (-ep) * wedge(wedge(dA(J, s), dA(J, nu)), volume_n(J, mu));
                el[s] += ep * F_low(jb, mu, nu);
            }
    e.expected["cartan_form"] = theta;
    e.expected["omega_L"] = omega;
    e.expected["euler_lagrange"] = el;

    // (-p^{nu mu} A_tau xi^tau_{,nu} + p^{nu mu} chi_{,nu} + p xi^mu) d^2x_mu - p^{tau mu} xi^nu dA_tau ^ d^1x_{mu nu}
    DiffForm Jm(Z, n1 - 1);
    for (int mu = 0; mu < n1; ++mu) {
        Expr c = S(jb.p()) * xi_j(mu, {});
        for (int nu = 0; nu < n1; ++nu) {
            c += S(jb.mom(nu, mu)) * chi_j({nu});
            for (int tau = 0; tau < n1; ++tau) c -= S(jb.mom(nu, mu)) * A(tau) * xi_j(tau, {nu});
        }
        Jm += c * volume_n(Z, mu);
        for (int tau = 0; tau < n1; ++tau)
            for (int nu = 0; nu < n1; ++nu)
                Jm += (-(S(jb.mom(tau, mu)) * xi_j(nu, {}))) * wedge(dA(Z, tau), volume_nm1(Z, mu, nu));
    }
    e.expected["momentum_map.diffeo_gauge"] = Jm;

    // 1/2 eps^{mu nu s} F_{mu nu} chi_{,s}
    Expr var;
    for (int mu = 0; mu < n1; ++mu)
        for (int nu = 0; nu < n1; ++nu)
            for (int s = 0; s < n1; ++s)
                var += scale(eps(mu, nu, s) * F_low(jb, mu, nu) * chi_j({s}), Rational(1, 2));
    e.expected["variation_of_L.diffeo_gauge"] = var;
    e.expected["variation_of_L.gauge"] = var;

    // (eps^{mu nu s}(-A_tau xi^tau_{,nu} - A_{nu,tau} xi^tau + chi_{,nu}) + 1/2 eps^{nu tau s} F_{nu tau} xi^mu) A_s d^2x_mu
    DiffForm cur(X, n1 - 1);
    for (int mu = 0; mu < n1; ++mu) {
        Expr c;
        for (int s = 0; s < n1; ++s) {
            Expr inner;
            for (int nu = 0; nu < n1; ++nu) {
                Expr ep = eps(mu, nu, s);
                if (!ep.is_zero()) {
                    Expr k = chi_j({nu});
                    for (int tau = 0; tau < n1; ++tau)
                        k -= A(tau) * xi_j(tau, {nu}) + S(jb.v(nu, tau)) * xi_j(tau, {});
                    inner += ep * k;
                }
                for (int tau = 0; tau < n1; ++tau)
                    inner += scale(eps(nu, tau, s) * F_low(jb, nu, tau) * xi_j(mu, {}), Rational(1, 2));
            }
            c += inner * A(s);
        }
        cur += c * volume_n(X, mu);
    }
    e.expected["noether_current.diffeo_gauge"] = cur;
    e.expected["vertical_transitivity"] = true;
    return e;
}

// ---- Polyakov string -----------------------------------------------------------------

namespace {

struct StringParts {
    std::vector<int> phi, h;  // fiber indices
    Metric hm{"h", 2};
    Expr G(const JetBundle& jb, int A, int B) const { return S(target_metric_symbol(jb, A, B)); }
    // induced metric G_AB v^A_s v^B_r
    Expr induced(const JetBundle& jb, int s, int r) const {
        Expr c;
        for (std::size_t a = 0; a < phi.size(); ++a)
            for (std::size_t b = 0; b < phi.size(); ++b)
                c += G(jb, int(a), int(b)) * S(jb.v(phi[a], s)) * S(jb.v(phi[b], r));
        return c;
    }
    Expr trace(const JetBundle& jb) const {
        Expr c;
        for (int s = 0; s < 2; ++s)
            for (int r = 0; r < 2; ++r) c += hm.gi(s, r) * induced(jb, s, r);
        return c;
    }
};

StringParts string_parts(const JetBundle& jb) {
    return {jb.field_fibers(jb.field_index("phi")), jb.field_fibers(jb.field_index("h"))};
}

}  // namespace

Theory make_polyakov_string(int d) {
    if (d < 1) throw std::invalid_argument("string target dimension must be >= 1");
    auto jb = jet_charts({2, {{"phi", IndexStructure::Scalar, true, d}, {"h", IndexStructure::Sym2, true, 1, 1}}});
    StringParts sp = string_parts(*jb);
    Expr L = scale(sp.hm.sqrtg() * sp.trace(*jb), Rational(-1, 2));
    GeneratorFamily gen{"diffeo_conformal", {}, zero_vec(jb->fiber_dim()), {gen_lambda()}, true};
    for (int mu = 0; mu < 2; ++mu) {
        gen.base.push_back(S(gen_xi(mu)));
        gen.params.push_back(gen_xi(mu));
    }
    for (int A : sp.h) {
        const SymbolDesc& dd = desc(jb->y(A));
        int s = dd.comp[0], r = dd.comp[1];
        Expr c = R(2) * S(gen_lambda()) * sp.hm.g(s, r);
        for (int mu = 0; mu < 2; ++mu) c -= sp.hm.g(s, mu) * xi_j(mu, {r}) + sp.hm.g(r, mu) * xi_j(mu, {s});
        gen.fiber[A] = c;
    }
    Theory t{"polyakov_string", jb, L, {gen}, {true, MetricKind::Variational, "h"}};
    validate(t);
    return t;
}

CatalogEntry polyakov_string_entry(int d) {
    CatalogEntry e{"polyakov_string", make_polyakov_string(d), {}};
    const JetBundle& jb = *e.theory.bundle;
    StringParts sp = string_parts(jb);
    const Metric& h = sp.hm;
    Expr sh = h.sqrtg();
    const ChartPtr& Z = jb.Z();

    // p_A^mu = -sqrt|h| h^{mu nu} G_AB v^B_nu, q = 0
    std::vector<Expr> mom;
    for (int A = 0; A < jb.fiber_dim(); ++A) {
        if (!jb.variational(A)) continue;
        for (int mu = 0; mu < 2; ++mu) {
            Expr c;
            if (jb.field_of(A) == jb.field_index("phi"))
                for (int nu = 0; nu < 2; ++nu)
                    for (std::size_t b = 0; b < sp.phi.size(); ++b)
                        c -= sh * h.gi(mu, nu) * sp.G(jb, A, int(b)) * S(jb.v(sp.phi[b], nu));
            mom.push_back(c);
        }
    }
    e.expected["legendre.momenta"] = mom;
    e.expected["legendre.p"] = scale(sh * sp.trace(jb), Rational(1, 2));

    // harmonic map: sqrt|h| [h^{mu nu}(G_AB w^B_{mu nu} + [CD,A] v^C_mu v^D_nu) - h^{mu nu} Gamma^l_{mu nu} G_AB v^B_l]
    auto dG = [&](int A, int B, int C) { return S(function_derivative(target_metric_symbol(jb, A, B), C)); };
    auto hjet = [&](int s, int r, int mu) { return S(jet_successor(metric_symbol("h", s, r), mu)); };
    auto gamma = [&](int l, int mu, int nu) {
        Expr c;
        for (int k = 0; k < 2; ++k)
            c += scale(h.gi(l, k) * (hjet(k, mu, nu) + hjet(k, nu, mu) - hjet(mu, nu, k)), Rational(1, 2));
        return c;
    };
    std::vector<Expr> el_phi;
    const int dd = int(sp.phi.size());
    for (int A = 0; A < dd; ++A) {
        Expr c;
        for (int mu = 0; mu < 2; ++mu)
            for (int nu = 0; nu < 2; ++nu) {
                Expr inner;
                for (int B = 0; B < dd; ++B) inner += sp.G(jb, A, B) * S(jb.w(sp.phi[B], mu, nu));
                for (int C = 0; C < dd; ++C)
                    for (int D = 0; D < dd; ++D)
                        inner += scale(dG(A, C, D) + dG(A, D, C) - dG(C, D, A), Rational(1, 2)) *
                                 S(jb.v(sp.phi[C], mu)) * S(jb.v(sp.phi[D], nu));
                for (int l = 0; l < 2; ++l)
                    for (int B = 0; B < dd; ++B) inner -= gamma(l, mu, nu) * sp.G(jb, A, B) * S(jb.v(sp.phi[B], l));
                c += h.gi(mu, nu) * inner;
            }
        el_phi.push_back(sh * c);
    }
    e.expected["euler_lagrange.phi"] = el_phi;
    // conformal equation, lowered symmetric form: 1/2 sqrt|h| (G_ab - 1/2 h_ab h^{mn} G_mn), a <= b
    std::vector<Expr> el_h;
    for (int a = 0; a < 2; ++a)
        for (int b = a; b < 2; ++b)
            el_h.push_back(scale(sh * (sp.induced(jb, a, b) - scale(h.g(a, b) * sp.trace(jb), Rational(1, 2))),
                                 Rational(1, 2)));
    e.expected["euler_lagrange.h_lowered"] = el_h;

    // [q^{srm}(2 lambda h_sr - h_sn xi^n_{,r} - h_rn xi^n_{,s}) + p xi^m] d^1x_m
    //   - (p_A^m xi^n dphi^A + q^{srm} xi^n dh_sr) eps_{mn}; q summed over s <= r as coordinate momenta
    DiffForm Jm(Z, 1);
    for (int mu = 0; mu < 2; ++mu) {
        Expr c = S(jb.p()) * xi_j(mu, {});
        for (int A : sp.h) {
            const SymbolDesc& ds = desc(jb.y(A));
            int s = ds.comp[0], r = ds.comp[1];
            Expr k = R(2) * S(gen_lambda()) * h.g(s, r);
            for (int nu = 0; nu < 2; ++nu) k -= h.g(s, nu) * xi_j(nu, {r}) + h.g(r, nu) * xi_j(nu, {s});
            c += S(jb.mom(A, mu)) * k;
        }
        Jm += c * volume_n(Z, mu);
        for (int nu = 0; nu < 2; ++nu)
            for (int A = 0; A < jb.fiber_dim(); ++A)
                Jm += (-(S(jb.mom(A, mu)) * xi_j(nu, {}))) *
                      wedge(DiffForm::dcoord(Z, 2 + A), volume_nm1(Z, mu, nu));
    }
    e.expected["momentum_map.diffeo_conformal"] = Jm;
    e.expected["variation_of_L.diffeo_conformal"] = Expr();
    e.expected["vertical_transitivity"] = false;
    return e;
}

std::vector<CatalogEntry> catalog() {
    return {particle_mechanics_entry(2), relativistic_particle_entry(), maxwell_entry(true), maxwell_entry(false),
            chern_simons_entry(), polyakov_string_entry(2)};
}

}  // namespace mfc
