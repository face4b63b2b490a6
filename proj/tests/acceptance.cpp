// Acceptance run: one PASS/FAIL line per criterion, failing sub-checks listed under it.
//
//   mfc_acceptance [--mfc PATH] [--data DIR] [--theories DIR] [-v]
//
// --mfc runs the command-line tool on the shipped files for the frontend criterion;
// without it that part runs in-process only.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "gen_bundles.hpp"
#include "mfc/frontend.hpp"
#include "mfc/suites.hpp"
#include "mfc/theories.hpp"

using namespace mfc;
using namespace oracle;

namespace {

// pinned tolerances
constexpr double kNumericTol = 1e-9;      // numeric-only comparisons (criterion 3, parametric g)
constexpr int kNumericSamples = 20;
constexpr double kFdTol = 1e-6;           // criterion 8
constexpr double kFdStep = 1e-5;
constexpr int kFdSamples = 50;
constexpr double kConsistencyTol = 1e-12;  // exact equalities re-checked numerically
constexpr int kConsistencySamples = 5;
constexpr int kTransitivitySeeds = 10;

struct Criterion {
    Criterion(int n, std::string t) : number(n), title(std::move(t)) {}
    int number;
    std::string title;
    int checks = 0;
    std::vector<std::string> failures;
    std::vector<std::string> notes;

    void check(bool ok, const std::string& what) {
        ++checks;
        if (!ok) failures.push_back(what);
    }
    void note(const std::string& s) { notes.push_back(s); }
};

// exact equalities collected for the numeric consistency pass
struct ExactPair {
    std::string what;
    Expected a, b;
};
std::vector<ExactPair> exact_log;

bool exact(const Expr& a, const Expr& b, const std::string& what) {
    bool ok = equal_symbolic(a, b);
    if (ok) exact_log.push_back({what, a, b});
    return ok;
}

bool exact(const DiffForm& a, const DiffForm& b, const std::string& what) {
    bool ok = equal_symbolic(a, b);
    if (ok) exact_log.push_back({what, a, b});
    return ok;
}

bool exact_zero(const DiffForm& a, const std::string& what) { return exact(a, DiffForm(a.chart(), a.degree()), what); }

bool exact(const Expected& got, const Expected& want, const std::string& what) {
    Comparison c = compare_expected(got, want, 1, 0.0);
    bool ok = c.equal && !c.numeric_fallback;
    if (ok) exact_log.push_back({what, got, want});
    return ok;
}

bool numeric_equal(const Expected& a, const Expected& b, int n, double tol, std::uint64_t seed) {
    if (a.index() != b.index()) return false;
    if (auto* x = std::get_if<bool>(&a)) return *x == std::get<bool>(b);
    if (auto* x = std::get_if<Expr>(&a)) return equal_numeric(*x, std::get<Expr>(b), n, tol, seed);
    if (auto* x = std::get_if<DiffForm>(&a)) return equal_numeric(*x, std::get<DiffForm>(b), n, tol, seed);
    const auto& xs = std::get<std::vector<Expr>>(a);
    const auto& ys = std::get<std::vector<Expr>>(b);
    if (xs.size() != ys.size()) return false;
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (!equal_numeric(xs[i], ys[i], n, tol, seed + i)) return false;
    return true;
}

Expr S(SymbolId s) { return Expr::sym(s); }

bool starts_with(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }

std::vector<BundleSpec> chart_specs() {
    return {mechanics_spec(2), mechanics_spec(4), maxwell_spec(true), maxwell_spec(false), cs_spec(), string_spec(2)};
}

// ---- 1 ----------------------------------------------------------------------------------

DiffForm omega_termwise(const JetBundle& jb) {
    const ChartPtr& Z = jb.Z();
    int n1 = jb.base_dim();
    DiffForm r = -wedge(DiffForm::dcoord(Z, Z->index_of(jb.p())), volume(Z));
    for (int A : jb.variational_fibers())
        for (int mu = 0; mu < n1; ++mu)
            r += wedge(wedge(DiffForm::dcoord(Z, n1 + A), DiffForm::dcoord(Z, Z->index_of(jb.mom(A, mu)))),
                       volume_n(Z, mu));
    return r;
}

void canonical_structure(Criterion& c) {
    for (const auto& spec : chart_specs()) {
        auto jb = jet_charts(spec);
        const int n1 = jb->base_dim();
        std::string tag = "n+1=" + std::to_string(n1) + " fiber " + std::to_string(jb->fiber_dim());
        DiffForm om = canonical_omega(*jb);
        c.check(exact(om, -exterior_d(canonical_theta(*jb)), "Omega = -dTheta " + tag), "Omega = -dTheta, " + tag);
        c.check(exact(om, omega_termwise(*jb), "Omega termwise " + tag), "Omega termwise, " + tag);

        // sigma^* Theta = phi^* sigma on random polynomial sections of Z
        ExprGen gx(40 + 7 * n1 + jb->fiber_dim(), base_syms(*jb));
        gx.with_sqrt = false;
        for (int t = 0; t < 20; ++t) {
            ChartMap sigma{jb->X(), jb->Z(), {}, std::nullopt, {}};
            for (SymbolId s : jb->Z()->coords()) {
                int A = jb->fiber_index(s);
                if (desc(s).kind == SymKind::BaseCoord) sigma.components.push_back(S(s));
                else if (A >= 0 && !jb->variational(A)) sigma.components.push_back(Expr(A == 0 ? -1 : 1));
                else sigma.components.push_back(gx.gen(2));
            }
            ChartMap phi{jb->X(), jb->Y(), {}, std::nullopt, {}};
            phi.components.assign(sigma.components.begin(), sigma.components.begin() + jb->Y()->dim());
            DiffForm sig = sigma.components[jb->Z()->index_of(jb->p())] * volume(jb->Y());
            for (int A : jb->variational_fibers())
                for (int mu = 0; mu < n1; ++mu)
                    sig += sigma.components[jb->Z()->index_of(jb->mom(A, mu))] *
                           wedge(DiffForm::dcoord(jb->Y(), n1 + A), volume_n(jb->Y(), mu));
            c.check(exact(pullback(sigma, canonical_theta(*jb)), pullback(phi, sig), "sigma^*Theta " + tag),
                    "sigma^*Theta = phi^*sigma, " + tag + ", sample " + std::to_string(t));
        }

        // pairing: the affine section through (z, gamma) pulls Theta back to <z, gamma> d^{n+1}x
        std::mt19937_64 rng(60 + n1);
        std::uniform_int_distribution<int> u(-9, 9);
        for (int t = 0; t < 10; ++t) {
            std::vector<Expr> zp, gp;
            for (int i = 0; i < jb->Z()->dim(); ++i) zp.push_back(Expr(u(rng)));
            for (int i = 0; i < jb->J1Y()->dim(); ++i) gp.push_back(Expr(u(rng)));
            for (int i = 0; i < jb->Y()->dim(); ++i) gp[i] = zp[i];
            ChartMap sec{jb->X(), jb->Z(), {}, std::nullopt, {}};
            for (int i = 0; i < jb->Z()->dim(); ++i) {
                SymbolId s = jb->Z()->coord(i);
                int A = jb->fiber_index(s);
                if (i < n1) sec.components.push_back(S(s));
                else if (A >= 0 && jb->variational(A)) {
                    Expr e = zp[i];
                    for (int mu = 0; mu < n1; ++mu)
                        e += gp[jb->J1Y()->index_of(jb->v(A, mu))] * (S(jb->x(mu)) - zp[mu]);
                    sec.components.push_back(e);
                } else sec.components.push_back(zp[i]);
            }
            std::vector<int> vol(n1);
            for (int i = 0; i < n1; ++i) vol[i] = i;
            c.check(exact(pullback(sec, canonical_theta(*jb)).coeff(vol), dual_pairing(*jb, zp, gp), "pairing " + tag),
                    "pairing identity, " + tag + ", sample " + std::to_string(t));
        }
    }
}

// ---- 2 ----------------------------------------------------------------------------------

void legendre_cartan(Criterion& c) {
    for (const auto& e : catalog()) {
        for (const auto& [key, want] : e.expected)
            if (starts_with(key, "legendre.") || starts_with(key, "cartan_form") || starts_with(key, "omega_L"))
                c.check(exact(derive_expected(e.theory, key), want, e.id + " " + key), e.id + " " + key);
        const JetBundle& jb = *e.theory.bundle;
        const Expr& L = e.theory.L;
        DiffForm a = cartan_form(jb, L), b = cartan_form_pullback(jb, L), k = cartan_form_contact(jb, L);
        c.check(exact(a, b, e.id + " Theta_L coordinate = pullback"), e.id + ": Theta_L coordinate formula = FL^* Theta");
        c.check(exact(a, k, e.id + " Theta_L coordinate = contact"), e.id + ": Theta_L coordinate formula = contact route");
    }
    Theory rp = make_relativistic_particle();
    c.check(exact(legendre(*rp.bundle, rp.L).p, Expr(), "relativistic particle p"), "relativistic particle p = 0");
}

// ---- 3 ----------------------------------------------------------------------------------

void euler_lagrange_regression(Criterion& c) {
    for (const auto& e : catalog())
        for (const auto& [key, want] : e.expected)
            if (starts_with(key, "euler_lagrange") && !(e.id == "maxwell_parametrized"))
                c.check(exact(derive_expected(e.theory, key), want, e.id + " " + key), e.id + " " + key + " (exact)");

    {  // covariant Maxwell at a parametric metric: -sqrt(-g) F^{nu mu}_{;mu}
        auto t = make_maxwell(false);
        const JetBundle& jb = *t.bundle;
        auto el = euler_lagrange(jb, t.L);
        const int n = 4;
        auto gi = [](int a, int b) { return S(inverse_metric_symbol("g", a, b)); };
        auto gj = [](int a, int b, int k) { return S(jet_successor(metric_symbol("g", a, b), k)); };
        auto F = [&](int a, int b) { return S(jb.v(b, a)) - S(jb.v(a, b)); };
        auto dF = [&](int a, int b, int k) { return S(jb.w(b, a, k)) - S(jb.w(a, b, k)); };
        auto dgi = [&](int a, int b, int k) {
            Expr r;
            for (int p = 0; p < n; ++p)
                for (int q = 0; q < n; ++q) r -= gi(a, p) * gi(b, q) * gj(p, q, k);
            return r;
        };
        auto Gam = [&](int a, int b, int k) {
            Expr r;
            for (int p = 0; p < n; ++p) r += gi(a, p) * (gj(p, b, k) + gj(p, k, b) - gj(b, k, p));
            return scale(r, Rational(1, 2));
        };
        auto Fup = [&](int a, int b) {
            Expr r;
            for (int p = 0; p < n; ++p)
                for (int q = 0; q < n; ++q) r += gi(a, p) * gi(b, q) * F(p, q);
            return r;
        };
        Expr sg = S(sqrt_neg_det_symbol("g"));
        for (int nu = 0; nu < n; ++nu) {
            Expr div;
            for (int mu = 0; mu < n; ++mu) {
                for (int p = 0; p < n; ++p)
                    for (int q = 0; q < n; ++q)
                        div += dgi(nu, p, mu) * gi(mu, q) * F(p, q) + gi(nu, p) * dgi(mu, q, mu) * F(p, q) +
                               gi(nu, p) * gi(mu, q) * dF(p, q, mu);
                for (int q = 0; q < n; ++q) div += Gam(mu, mu, q) * Fup(nu, q);
            }
            c.check(equal_numeric(el[nu], -(sg * div), kNumericSamples, kNumericTol, 40 + nu),
                    "Maxwell covariant form at parametric g, component " + std::to_string(nu));
        }
    }

    {  // geodesics of a curved target metric G_AB(q), up to a constant factor
        const int k = 2;
        auto jb = jet_charts(mechanics_spec(k));
        std::vector<SymbolId> q;
        for (int A = 0; A < k; ++A) q.push_back(jb->y(A));
        auto G = [&](int A, int B) {
            SymbolDesc d;
            d.family = "Gacc";
            d.kind = SymKind::DerivedScalar;
            d.rule = Rule::Function;
            d.comp = {A, B};
            d.comp_up = {false, false};
            d.comp_sym = true;
            d.args = q;
            return intern(std::move(d));
        };
        auto Ge = [&](int A, int B) { return S(G(A, B)); };
        auto dG = [&](int A, int B, int C) { return S(function_derivative(G(A, B), C)); };
        auto v = [&](int A) { return S(jb->v(A, 0)); };
        auto w = [&](int A) { return S(jb->w(A, 0, 0)); };
        Expr quad;
        for (int A = 0; A < k; ++A)
            for (int B = 0; B < k; ++B) quad += Ge(A, B) * v(A) * v(B);
        Expr s = sqrt(-quad), m = S(relativistic_mass());
        auto el = euler_lagrange(*jb, -(m * s));
        // geodesic operator in proper-time form: d/ds (G_AB v^B / s) - 1/2 G_BC,A v^B v^C / s
        Expr sdot;
        for (int B = 0; B < k; ++B)
            for (int C = 0; C < k; ++C) {
                for (int D = 0; D < k; ++D) sdot += dG(B, C, D) * v(D) * v(B) * v(C);
                sdot += Expr(2) * Ge(B, C) * v(B) * w(C);
            }
        sdot = scale(-sdot * pow(s, -1), Rational(1, 2));
        std::ostringstream factors;
        bool all = true;
        for (int A = 0; A < k; ++A) {
            Expr ddt, force;
            for (int B = 0; B < k; ++B) {
                Expr gv;
                for (int C = 0; C < k; ++C) gv += dG(A, B, C) * v(C);
                ddt += (gv * v(B) + Ge(A, B) * w(B)) * pow(s, -1) - Ge(A, B) * v(B) * sdot * pow(s, -2);
                for (int C = 0; C < k; ++C) force += dG(B, C, A) * v(B) * v(C);
            }
            Expr geo = ddt - scale(force * pow(s, -1), Rational(1, 2));
            // the factor: the ratio at a sample point, then confirmed exactly
            std::mt19937_64 rng(90 + A);
            Assignment at = sample_assignment({el[A], geo}, rng);
            double ratio = eval_numeric(el[A], at) / eval_numeric(geo, at), mv = at.get(relativistic_mass());
            bool is_minus_m = std::abs(ratio + mv) < 1e-9 * (1 + std::abs(mv));
            bool ok = is_minus_m && exact(el[A], -(m * geo), "geodesic component " + std::to_string(A));
            all = all && ok;
            c.check(ok, "geodesic equation component " + std::to_string(A) + " = factor * geodesic operator");
        }
        if (all) c.note("geodesic factor: -m (ratio at sample points, confirmed symbolically)");
    }
}

// ---- 4 ----------------------------------------------------------------------------------

void momentum_maps(Criterion& c) {
    for (const auto& e : catalog()) {
        const Theory& t = e.theory;
        const JetBundle& jb = *t.bundle;
        DiffForm om = canonical_omega(jb), th = canonical_theta(jb);
        for (const auto& g : t.generators) {
            std::string tag = e.id + "/" + g.name;
            VectorField xz = lift_vector_to_Z(jb, generator_on_Y(t, g));
            c.check(exact(exterior_d(covariant_momentum_map(t, g)), interior(xz, om), tag + " dJ"), tag + ": dJ = xi_Z -| Omega");
            c.check(exact(covariant_momentum_map(t, g), interior(xz, th), tag + " J contraction"),
                    tag + ": J = xi_Z -| Theta");
            c.check(exact_zero(lie_derivative(xz, th), tag + " L Theta"), tag + ": L_{xi_Z} Theta = 0");
            DiffForm jl = lagrangian_momentum_map(t, g);
            c.check(exact(jl, lagrangian_momentum_map_pullback(t, g), tag + " J^L pullback"),
                    tag + ": J^L coordinate formula = FL^* J");
            c.check(exact(jl, lagrangian_momentum_map_contraction(t, g), tag + " J^L contraction"),
                    tag + ": J^L coordinate formula = xi -| Theta_L");
        }
        for (const auto& [key, want] : e.expected)
            if (starts_with(key, "momentum_map.") || starts_with(key, "lagrangian_momentum_map.") ||
                starts_with(key, "noether_current."))
                c.check(exact(derive_expected(t, key), want, e.id + " " + key), e.id + " " + key);
    }
}

// ---- 5 ----------------------------------------------------------------------------------

// affine in (x, y) with small integer coefficients
Expr random_affine(std::mt19937_64& rng, const std::vector<SymbolId>& syms) {
    std::uniform_int_distribution<int> u(-3, 3);
    Expr r(u(rng));
    for (SymbolId s : syms) r += Expr(u(rng)) * S(s);
    return r;
}

void noether(Criterion& c, const std::vector<Theory>& shipped) {
    for (const auto& e : catalog())
        for (const auto& g : e.theory.generators)
            c.check(noether_divergence_identity(e.theory, g).residual.is_zero(),
                    e.id + "/" + g.name + ": divergence identity residual zero");

    const auto specs = std::vector<BundleSpec>{mechanics_spec(2), cs_spec(), string_spec(1), maxwell_spec(false)};
    for (int i = 0; i < 20; ++i) {
        auto jb = jet_charts(specs[i % specs.size()]);
        ExprGen gl(500 + i, jb->J1Y()->coords());
        gl.with_sqrt = false;
        std::mt19937_64 rng(600 + i);
        GeneratorFamily g{"affine", {}, {}, {gen_chi()}};
        for (int mu = 0; mu < jb->base_dim(); ++mu) g.base.push_back(random_affine(rng, base_syms(*jb)));
        for (int A = 0; A < jb->fiber_dim(); ++A)
            g.fiber.push_back(jb->variational(A) ? random_affine(rng, var_syms(*jb)) : random_affine(rng, jb->Y()->coords()));
        // plus a gauge-like jet-parameter piece
        g.base[0] += S(gen_chi());
        for (int A : jb->variational_fibers()) g.fiber[A] += S(gen_jet(gen_chi(), {A % jb->base_dim()}));
        Theory t{"random", jb, gl.gen(i % 4 < 2 ? 3 : 2), {g}, {}};
        c.check(noether_divergence_identity(t, t.generators[0]).residual.is_zero(),
                "random Lagrangian " + std::to_string(i) + ": divergence identity residual zero");
    }

    {  // substitution of explicit solutions
        auto t = make_maxwell(true);
        const JetBundle& jb = *t.bundle;
        SymbolicSection phi{std::vector<Expr>(4)};
        phi.components[2] = pow(S(jb.x(0)) + S(jb.x(1)), 3);
        DiffForm cur = noether_current(t, t.generator("gauge"), phi);
        c.check(!cur.is_zero() && exterior_d(cur).is_zero(), "Maxwell plane wave: gauge current conserved");
        auto cs = make_chern_simons();
        const JetBundle& cb = *cs.bundle;
        Expr f = pow(S(cb.x(0)), 2) * S(cb.x(1)) + S(cb.x(2)) * S(cb.x(1)) * S(cb.x(0));
        SymbolicSection pure{{}};
        for (int mu = 0; mu < 3; ++mu) pure.components.push_back(partial(f, *cb.X(), mu));
        for (const auto& g : cs.generators)
            c.check(exterior_d(noether_current(cs, g, pure)).is_zero(), "Chern-Simons flat connection: " + g.name + " current conserved");
    }
    VerifyPlan plan{kNumericSamples, kNumericTol, 7};
    for (const auto& t : shipped)
        for (const auto& g : t.generators)
            if (g.symmetry) {
                OnShellVerdict v = on_shell_conservation(t, g, plan);
                c.check(v.conserved, t.name + "/" + g.name + ": conserved on solutions (" + v.detail + ")");
            }

    {  // converse: Maxwell's equations from the gauge Noether law
        auto t = make_maxwell(true);
        const JetBundle& jb = *t.bundle;
        auto ce = converse_noether(t, t.generator("gauge"));
        bool forced = ce.forced.size() == 4;
        for (bool b : ce.forced) forced = forced && b;
        c.check(forced, "Maxwell converse: every dL/dA_nu forced to vanish");
        // the forced unknowns are the EL expressions, which are Maxwell's equations
        auto el = euler_lagrange(jb, t.L);
        CatalogEntry entry = maxwell_entry(true);
        const auto& want = std::get<std::vector<Expr>>(entry.at("euler_lagrange"));
        bool same = el.size() == want.size();
        for (std::size_t i = 0; same && i < el.size(); ++i) same = equal_symbolic(el[i], want[i]);
        c.check(same, "Maxwell converse: the forced expressions are Maxwell's equations");
    }
    for (int d : {2, 3}) {  // string: only the contracted target equation
        auto t = make_polyakov_string(d);
        const JetBundle& jb = *t.bundle;
        auto ce = converse_noether(t, t.generator("diffeo_conformal"));
        auto st = converse_stages(t, ce);
        auto hf = jb.field_fibers(jb.field_index("h"));
        auto ph = jb.field_fibers(jb.field_index("phi"));
        bool hforced = true, phfree = true;
        for (int A : hf) hforced = hforced && st.forced_single[A];
        for (int A : ph) phfree = phfree && !st.forced_single[A];
        std::string tag = "string d=" + std::to_string(d);
        c.check(hforced, tag + ": dL/dh forced by the single-field equations");
        c.check(phfree, tag + ": dL/dphi not forced by them");
        bool match = st.contracted.size() == 2;
        for (int nu = 0; match && nu < 2; ++nu) {
            Expr want;
            for (int A : ph) want += S(ce.unknowns[A]) * S(jb.v(A, nu));
            bool hit = false;
            for (const auto& e : st.contracted) hit = hit || e == want || e == -want;
            match = hit;
        }
        c.check(match, tag + ": remaining equations are E_A phi^A_{,nu} = 0 exactly");
        if (d == 3) {
            bool weaker = true;
            for (int A : ph) weaker = weaker && !ce.forced[A];
            c.check(weaker, tag + ": contracted equations do not force dL/dphi (weaker than EL)");
        }
    }
}

// ---- 6 ----------------------------------------------------------------------------------

void brackets(Criterion& c) {
    {
        auto t = make_maxwell(true);
        const auto& g = t.generator("gauge");
        auto b = momentum_bracket_identity(t, g, rename_parameters(g, "'"));
        c.check(exact_zero(b.residual, "EM bracket residual") && b.commutator.is_zero(), "abelian EM pair: bracket identity");
        auto mech = make_particle_mechanics(2);
        GeneratorFamily dt{"dt", {Expr(1)}, {Expr(), Expr()}, {}}, dq{"dq", {Expr()}, {Expr(1), Expr()}, {}};
        auto bm = momentum_bracket_identity(mech, dt, dq);
        c.check(exact_zero(bm.residual, "translation bracket residual") && bm.commutator.is_zero(),
                "commuting translations: bracket identity");
    }
    for (const auto& e : catalog())
        for (const auto& a : e.theory.generators) {
            auto b = momentum_bracket_identity(e.theory, a, rename_parameters(a, "'"));
            c.check(exact_zero(b.residual, e.id + " bracket"), e.id + "/" + a.name + ": bracket identity with itself (renamed)");
            for (const auto& g : e.theory.generators)
                c.check(exact_zero(equivariance_infinitesimal(e.theory, a, rename_parameters(g, "'")),
                                   e.id + " equivariance"),
                        e.id + ": L_{zeta_Z} J(" + a.name + ") = J([" + a.name + ", " + g.name + "'])");
        }
    for (const auto& e : catalog())
        for (const auto& g : e.theory.generators) {
            Expr dl = variation_of_L(e.theory, g);
            if (!(equal_symbolic(dl, Expr()) || equal_numeric(dl, Expr(), 8, kNumericTol, 11))) continue;
            bool ok = true;
            for (const auto& r : legendre_equivariance_check(e.theory, g))
                ok = ok && (r.is_zero() || equal_numeric(r, Expr(), 8, kNumericTol, 12));
            DiffForm ci = cartan_invariance_check(e.theory, g);
            ok = ok && (ci.is_zero() || equal_numeric(ci, DiffForm(ci.chart(), ci.degree()), 8, kNumericTol, 13));
            c.check(ok, e.id + "/" + g.name + ": Legendre map and Cartan form equivariant");
        }
    {  // Chern-Simons gauge: not a symmetry of L, and the equivariance fails
        auto t = make_chern_simons();
        auto res = legendre_equivariance_check(t, t.generator("gauge"));
        std::mt19937_64 rng(5);
        Assignment a = sample_assignment(res, rng);
        double worst = 0;
        for (const auto& r : res) worst = std::max(worst, std::abs(eval_numeric(r, a)));
        c.check(worst > 1e-3, "Chern-Simons gauge counterexample: nonzero residual at a witness point");
        std::ostringstream s;
        s << "Chern-Simons gauge non-equivariance flagged, witness |residual| = " << worst;
        c.note(s.str());
    }
}

// ---- 7 ----------------------------------------------------------------------------------

void transitivity(Criterion& c) {
    bool stable = true;
    for (std::uint64_t seed = 1; seed <= kTransitivitySeeds; ++seed) {
        bool mx = vertical_transitivity(make_maxwell(true), 3, seed).verdict;
        auto t = make_polyakov_string(2);
        const JetBundle& jb = *t.bundle;
        auto r = vertical_transitivity(t, 3, seed);
        double hw = 0, pw = 0;
        for (int A : jb.field_fibers(jb.field_index("h"))) hw += std::abs(r.witness.at(A));
        for (int A : jb.field_fibers(jb.field_index("phi"))) pw += std::abs(r.witness.at(A));
        bool ok = mx && !r.verdict && hw < 1e-9 && pw > 0.5;
        stable = stable && ok;
        c.check(ok, "seed " + std::to_string(seed) + ": Maxwell transitive, string not, witness along d/dphi");
    }
    if (stable) c.note("verdicts identical across " + std::to_string(kTransitivitySeeds) + " seeds");
}

// ---- 8 ----------------------------------------------------------------------------------

void oracles(Criterion& c) {
    VerifyPlan plan{kFdSamples, kFdTol, 17};
    int checked = 0, skipped = 0;
    auto fd = [&](const Expr& e, SymbolId s, const std::string& what) {
        VerifyReport r = finite_difference_check(e, s, plan, kFdStep);
        if (r.skipped) {
            ++skipped;
            return;
        }
        ++checked;
        c.check(r.passed, what + " (" + r.detail + ")");
    };
    for (const auto& e : catalog()) {
        const Theory& t = e.theory;
        const JetBundle& jb = *t.bundle;
        for (SymbolId s : jb.J1Y()->coords()) fd(t.L, s, e.id + ": dL/d" + display_name(s));
        LegendreResult lr = legendre(jb, t.L);
        for (SymbolId s : jb.J1Y()->coords()) fd(lr.p, s, e.id + ": dp/d" + display_name(s));
    }
    {  // stress-energy from the metric derivative
        auto t = make_maxwell(false);
        for (const auto& [sr, T] : stress_energy_from_parametric_metric(t)) fd(t.L, metric_symbol("g", sr.first, sr.second), "maxwell_parametrized: dL/dg");
    }
    for (int i = 0; i < 10; ++i) {
        auto jb = jet_charts(chart_specs()[i % 6]);
        auto syms = jb->J1Y()->coords();
        syms.resize(std::min<std::size_t>(syms.size(), 6));
        ExprGen g(800 + i, syms);
        Expr e = g.gen(3);
        for (SymbolId s : atoms_of(e))
            if (!is_sqrt_atom(s) && desc(s).rule == Rule::None) fd(e, s, "random expression " + std::to_string(i));
    }
    c.note(std::to_string(checked) + " derivatives against central differences, " + std::to_string(skipped) +
           " skipped (undetermined function symbols)");

    int consistent = 0;
    for (std::size_t i = 0; i < exact_log.size(); ++i) {
        bool ok = numeric_equal(exact_log[i].a, exact_log[i].b, kConsistencySamples, kConsistencyTol, 1000 + i);
        consistent += ok;
        c.check(ok, "exact equality not confirmed numerically at 1e-12: " + exact_log[i].what);
    }
    c.note(std::to_string(consistent) + "/" + std::to_string(exact_log.size()) +
           " exact equalities from criteria 1-6 confirmed by equal_numeric at 1e-12");
}

// ---- 9 ----------------------------------------------------------------------------------

std::string read(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// runs a command, returns (exit code, combined output)
std::pair<int, std::string> run(const std::string& cmd) {
    std::string out;
    FILE* f = popen((cmd + " 2>&1").c_str(), "r");
    if (!f) return {-1, ""};
    char buf[4096];
    while (std::size_t n = fread(buf, 1, sizeof buf, f)) out.append(buf, n);
    int st = pclose(f);
    return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

void frontend(Criterion& c, const std::vector<Theory>& shipped, const std::string& mfc, const std::string& data,
              const std::string& theories) {
    std::map<std::string, CatalogEntry> cat;
    for (auto& e : catalog()) cat.emplace(e.id, std::move(e));
    c.check(shipped.size() == builtin_theory_files().size(), "every shipped file parses and elaborates");
    for (const Theory& t : shipped) {
        auto it = cat.find(t.name);
        if (it == cat.end()) {
            c.check(false, t.name + ": no catalog entry");
            continue;
        }
        const Theory& ref = it->second.theory;
        bool same = t.bundle->J1Y()->coords() == ref.bundle->J1Y()->coords() && t.L == ref.L &&
                    t.generators.size() == ref.generators.size();
        for (std::size_t i = 0; same && i < t.generators.size(); ++i)
            same = t.generators[i].base == ref.generators[i].base && t.generators[i].fiber == ref.generators[i].fiber;
        c.check(same, t.name + ": charts, Lagrangian and generators equal the catalog");
        for (const auto& [key, want] : it->second.expected) {
            Comparison cmp = compare_expected(derive_expected(t, key), want, 8, kNumericTol, 1);
            c.check(cmp.equal, t.name + " " + key + " from the file matches the catalog");
        }
        for (const auto& r : run_suite(t, "all", VerifyPlan{20, 1e-9, 7}))
            c.check(r.passed, t.name + ": check " + r.suite + "/" + r.name + " (" + r.detail + ")");
    }
    std::string corrupted = data + "/maxwell_corrupted.thy";
    Theory bad = load_theory(read(corrupted));
    bool failed = false, named = false;
    for (const auto& r : run_suite(bad, "noether", VerifyPlan{20, 1e-9, 7}))
        if (!r.passed) failed = true, named = named || r.detail.find("Eq. 4D.9") != std::string::npos;
    c.check(failed && named, "corrupted Maxwell: noether suite fails naming Eq. 4D.9");

    if (mfc.empty()) {
        c.note("command-line exit codes not exercised (no --mfc)");
        return;
    }
    for (const auto& [name, src] : builtin_theory_files()) {
        (void)src;
        auto [code, out] = run(mfc + " check " + theories + "/" + name + " --suite all --samples 20 --tol 1e-9 --seed 7");
        c.check(code == 0, "mfc check " + name + " --suite all exits 0 (got " + std::to_string(code) + ")");
    }
    auto [code, out] = run(mfc + " check " + corrupted + " --suite noether");
    c.check(code == 1 && out.find("Eq. 4D.9") != std::string::npos,
            "mfc check maxwell_corrupted.thy --suite noether exits 1 naming Eq. 4D.9 (got " + std::to_string(code) + ")");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::string mfc, data = MFC_TEST_DATA, theories = MFC_THEORY_DIR;
    bool verbose = false;
    app.add_option("--mfc", mfc, "path to the mfc executable");
    app.add_option("--data", data, "test data directory");
    app.add_option("--theories", theories, "directory of the shipped .thy files");
    app.add_flag("-v,--verbose", verbose, "print notes for passing criteria too");
    CLI11_PARSE(app, argc, argv);

    std::vector<Theory> shipped;
    for (const auto& [name, src] : builtin_theory_files()) {
        try {
            shipped.push_back(load_theory(src));
        } catch (const std::exception& e) {
            std::cerr << name << ": " << e.what() << "\n";
        }
    }

    std::vector<std::pair<Criterion, std::function<void(Criterion&)>>> all = {
        {{1, "canonical structure: Omega = -dTheta, sigma^*Theta = phi^*sigma, pairing"}, canonical_structure},
        {{2, "Legendre transform and Cartan form regression"}, legendre_cartan},
        {{3, "Euler-Lagrange regression"}, euler_lagrange_regression},
        {{4, "momentum maps"}, momentum_maps},
        {{5, "Noether: divergence identity, conservation on solutions, converse"},
         [&](Criterion& c) { noether(c, shipped); }},
        {{6, "bracket and equivariance"}, brackets},
        {{7, "vertical transitivity"}, transitivity},
        {{8, "oracles: finite differences and numeric consistency"}, oracles},
        {{9, "frontend: shipped files, check suites, corrupted input"},
         [&](Criterion& c) { frontend(c, shipped, mfc, data, theories); }},
    };

    int failed = 0;
    for (auto& [c, body] : all) {
        auto t0 = std::chrono::steady_clock::now();
        try {
            body(c);
        } catch (const std::exception& e) {
            c.check(false, std::string("exception: ") + e.what());
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool ok = c.failures.empty();
        failed += !ok;
        std::printf("criterion %d: %s  %s (%d checks, %d failed, %.1fs)\n", c.number, ok ? "PASS" : "FAIL",
                    c.title.c_str(), c.checks, int(c.failures.size()), secs);
        if (!ok || verbose)
            for (const auto& n : c.notes) std::printf("    note: %s\n", n.c_str());
        for (const auto& f : c.failures) std::printf("    failed: %s\n", f.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", int(all.size()) - failed, all.size());
    return failed ? 1 : 0;
}
