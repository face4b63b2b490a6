#include "mfc/suites.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <set>
#include <sstream>

namespace mfc {

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {"forms", "legendre", "noether", "bracket", "transitivity", "all"};
    return names;
}

namespace {

constexpr double kFiniteDifferenceTol = 1e-6;

std::string sci(double x) {
    std::ostringstream os;
    os.precision(2);
    os << std::scientific << x;
    return os.str();
}

// every coefficient of a form, keyed by wedge, on the union of both supports
std::vector<std::pair<Expr, Expr>> coefficient_pairs(const DiffForm& a, const DiffForm& b) {
    std::set<Wedge> ws;
    for (const auto& [w, c] : a.terms()) ws.insert(w);
    for (const auto& [w, c] : b.terms()) ws.insert(w);
    std::vector<std::pair<Expr, Expr>> r;
    for (const auto& w : ws) r.emplace_back(a.coeff(w), b.coeff(w));
    return r;
}

}  // namespace

CheckResult check_equal(const std::string& suite, const std::string& name, const Expr& a, const Expr& b,
                        const VerifyPlan& plan) {
    if (equal_symbolic(a, b)) return {suite, name, true, "exact"};
    VerifyReport r = verify_identity(a, b, plan);
    return {suite, name, r.passed, (r.passed ? "numeric, " : "") + r.detail};
}

CheckResult check_equal(const std::string& suite, const std::string& name, const DiffForm& a, const DiffForm& b,
                        const VerifyPlan& plan) {
    if (a.degree() != b.degree()) return {suite, name, false, "degrees differ"};
    if (!(*a.chart() == *b.chart())) return {suite, name, false, "charts differ"};
    bool exact = true;
    double worst = 0;
    for (const auto& [x, y] : coefficient_pairs(a, b)) {
        if (equal_symbolic(x, y)) continue;
        exact = false;
        VerifyReport r = verify_identity(x, y, plan);
        worst = std::max(worst, r.max_deviation);
        if (!r.passed) return {suite, name, false, r.detail};
    }
    if (exact) return {suite, name, true, "exact"};
    return {suite, name, true, "numeric, max deviation " + sci(worst)};
}

OnShellVerdict on_shell_conservation(const Theory& t, const GeneratorFamily& g, const VerifyPlan& plan) {
    const JetBundle& jb = *t.bundle;
    Expr delta = variation_of_L(t, g);
    if (equal_symbolic(delta, Expr())) return {true, true, "delta_xi L = 0"};
    if (verify_identity(delta, Expr(), plan).passed) return {true, false, "delta_xi L = 0 (numeric)"};

    std::vector<SymbolId> params;
    for (SymbolId a : atoms_of(delta))
        if (!is_sqrt_atom(a) && desc(a).xdep) params.push_back(a);
    std::vector<Expr> el = euler_lagrange(jb, t.L);
    auto coeffs = collect(delta, params);
    std::mt19937_64 rng(plan.seed);
    const int n_el = int(el.size());
    const int rows = std::max(plan.n_samples, 2 * n_el + 4);
    for (const auto& [mono, c] : coeffs) {
        std::vector<Expr> all = el;
        all.push_back(c);
        Eigen::MatrixXd M(rows, n_el);
        Eigen::VectorXd rhs(rows);
        std::vector<Assignment> pts;
        for (int i = 0; i < 2 * rows; ++i) pts.push_back(sample_assignment(all, rng));
        for (int i = 0; i < rows; ++i) {
            for (int A = 0; A < n_el; ++A) M(i, A) = eval_numeric(el[A], pts[i]);
            rhs(i) = eval_numeric(c, pts[i]);
        }
        Eigen::VectorXd lam = n_el ? Eigen::VectorXd(M.colPivHouseholderQr().solve(rhs)) : Eigen::VectorXd();
        // fit on the first half, test on the second
        double worst = 0;
        for (int i = rows; i < 2 * rows; ++i) {
            double fit = 0;
            for (int A = 0; A < n_el; ++A) fit += lam(A) * eval_numeric(el[A], pts[i]);
            double y = eval_numeric(c, pts[i]);
            worst = std::max(worst, std::abs(fit - y) / (1 + std::abs(fit) + std::abs(y)));
        }
        if (!(worst <= std::max(plan.tol, 1e-8))) {
            std::string m;
            for (const auto& [s, k] : mono) m += (m.empty() ? "" : "·") + display_symbol(s) + (k == 1 ? "" : "^" + std::to_string(k));
            return {false, false,
                    "Eq. 4D.9: delta_xi L does not vanish on solutions, so d(current) != 0 on shell; the coefficient of " +
                        (m.empty() ? std::string("1") : m) + " is not a combination of the Euler-Lagrange expressions (misfit " +
                        sci(worst) + ")"};
        }
    }
    return {true, false, "delta_xi L vanishes on solutions (combination of the Euler-Lagrange expressions)"};
}

namespace {

void forms_suite(const Theory& t, const VerifyPlan& plan, std::vector<CheckResult>& out) {
    const JetBundle& jb = *t.bundle;
    const std::string s = "forms";
    out.push_back(check_equal(s, "Omega = -d Theta on Z", canonical_omega(jb), -exterior_d(canonical_theta(jb)), plan));
    DiffForm th = cartan_form(jb, t.L);
    DiffForm om = omega_L(jb, t.L);
    out.push_back(check_equal(s, "Theta_L coordinate formula = FL^* Theta", th, cartan_form_pullback(jb, t.L), plan));
    out.push_back(check_equal(s, "Theta_L coordinate formula = contact form", th, cartan_form_contact(jb, t.L), plan));
    out.push_back(check_equal(s, "Omega_L = -d Theta_L", om, -exterior_d(th), plan));
    out.push_back(check_equal(s, "Omega_L = FL^* Omega", om, pullback(legendre(jb, t.L).map, canonical_omega(jb)), plan));
    out.push_back(check_equal(s, "d Omega_L = 0", exterior_d(om), DiffForm(jb.J1Y(), om.degree() + 1), plan));
    SymbolicSection phi = generic_section(jb);
    out.push_back(check_equal(s, "(j1 phi)^* Theta_L = L(j1 phi) d^{n+1}x", lagrangian_reconstruction(jb, t.L, phi),
                              prolong_section(jb, phi, 1).pull(t.L), plan));
    for (int A : jb.variational_fibers()) {
        VectorField V = VectorField::coordinate(jb.Y(), jb.base_dim() + A);
        out.push_back(check_equal(s, "Euler-Lagrange via Omega_L along d/d" + display_name(jb.y(A)),
                                  el_via_cartan(jb, t.L, phi, V), el_residual_contraction(jb, t.L, phi, V), plan));
    }
}

void legendre_suite(const Theory& t, const VerifyPlan& plan, std::vector<CheckResult>& out) {
    const JetBundle& jb = *t.bundle;
    const std::string s = "legendre";
    LegendreResult lr = legendre(jb, t.L);
    Expr pv;
    VerifyPlan fd = plan;
    fd.tol = kFiniteDifferenceTol;
    for (int A : jb.variational_fibers())
        for (int mu = 0; mu < jb.base_dim(); ++mu) {
            SymbolId v = jb.v(A, mu);
            std::string nm = display_name(jb.mom(A, mu));
            out.push_back(check_equal(s, nm + " = dL/d" + display_name(v), lr.momenta.at(jb.mom(A, mu)), diff(t.L, v), plan));
            VerifyReport r = finite_difference_check(t.L, v, fd);
            out.push_back({s, "dL/d" + display_name(v) + " vs central difference", r.passed, r.detail});
            pv += lr.momenta.at(jb.mom(A, mu)) * Expr::sym(v);
        }
    out.push_back(check_equal(s, "p = L - p_A^mu v^A_mu", lr.p, t.L - pv, plan));
    // FL covers the Z coordinates it should: the pairing p + p_A^mu v^A_mu reproduces L
    std::vector<Expr> z;
    for (SymbolId c : jb.Z()->coords()) z.push_back(lr.map.pull(Expr::sym(c)));
    std::vector<Expr> gamma;
    for (SymbolId c : jb.J1Y()->coords()) gamma.push_back(Expr::sym(c));
    out.push_back(check_equal(s, "<FL(gamma), gamma> = L", dual_pairing(jb, z, gamma), t.L, plan));
}

void noether_suite(const Theory& t, const VerifyPlan& plan, std::vector<CheckResult>& out) {
    const JetBundle& jb = *t.bundle;
    const std::string s = "noether";
    DiffForm th = canonical_theta(jb), om = canonical_omega(jb);
    for (const auto& g : t.generators) {
        const std::string tag = " [" + g.name + "]";
        DivergenceIdentity di = noether_divergence_identity(t, g);
        CheckResult c = check_equal(s, "divergence identity" + tag, di.lhs, di.rhs, plan);
        if (!c.passed) c.detail = "Eq. 4D.9 residual nonzero: " + c.detail;
        out.push_back(c);
        DiffForm jl = lagrangian_momentum_map(t, g);
        out.push_back(check_equal(s, "J^L coordinate formula = FL^* J" + tag, jl, lagrangian_momentum_map_pullback(t, g), plan));
        out.push_back(
            check_equal(s, "J^L coordinate formula = xi -| Theta_L" + tag, jl, lagrangian_momentum_map_contraction(t, g), plan));
        VectorField xi = generator_on_Y(t, g);
        DiffForm J = covariant_momentum_map(jb, xi);
        VectorField xz = lift_vector_to_Z(jb, xi);
        out.push_back(check_equal(s, "J = xi_Z -| Theta" + tag, J, momentum_map_contraction(jb, xi), plan));
        out.push_back(check_equal(s, "dJ = xi_Z -| Omega" + tag, exterior_d(J), interior(xz, om), plan));
        out.push_back(check_equal(s, "Lie derivative of Theta along xi_Z vanishes" + tag, lie_derivative(xz, th),
                                  DiffForm(jb.Z(), th.degree()), plan));
        if (g.symmetry) {
            OnShellVerdict v = on_shell_conservation(t, g, plan);
            out.push_back({s, "current conserved on solutions" + tag, v.conserved, v.detail});
        }
    }
}

void bracket_suite(const Theory& t, const VerifyPlan& plan, std::vector<CheckResult>& out) {
    const std::string s = "bracket";
    for (const auto& a : t.generators)
        for (const auto& b0 : t.generators) {
            GeneratorFamily b = rename_parameters(b0, "'");
            const std::string tag = " [" + a.name + ", " + b0.name + "']";
            BracketIdentity bi = momentum_bracket_identity(t, a, b);
            out.push_back(check_equal(s, "{J(xi), J(zeta)} = J([xi,zeta]) + exact" + tag, bi.bracket,
                                      bi.exact + bi.commutator, plan));
            DiffForm eq = equivariance_infinitesimal(t, a, b);
            out.push_back(check_equal(s, "infinitesimal equivariance" + tag, eq, DiffForm(eq.chart(), eq.degree()), plan));
        }
}

void transitivity_suite(const Theory& t, const VerifyPlan& plan, std::vector<CheckResult>& out) {
    TransitivityResult first;
    bool stable = true;
    for (int k = 0; k < 5; ++k) {
        TransitivityResult r = vertical_transitivity(t, 5, plan.seed + k);
        if (k == 0) first = r;
        else stable &= r.verdict == first.verdict && r.rank == first.rank;
    }
    std::string d = std::string(first.verdict ? "transitive" : "not transitive") + ", rank " + std::to_string(first.rank) +
                    " of " + std::to_string(int(t.bundle->variational_fibers().size()));
    if (!first.verdict) {
        d += ", missing direction";
        const JetBundle& jb = *t.bundle;
        for (std::size_t A = 0; A < first.witness.size(); ++A)
            if (std::abs(first.witness[A]) > 1e-9) d += " " + sci(first.witness[A]) + " d/d" + display_name(jb.y(int(A)));
    }
    out.push_back({"transitivity", "verdict stable across 5 seeds", stable, d});
}

}  // namespace

std::vector<CheckResult> run_suite(const Theory& t, const std::string& suite, const VerifyPlan& plan) {
    if (plan.n_samples < 1) throw std::invalid_argument("--samples must be at least 1");
    std::vector<CheckResult> out;
    bool all = suite == "all";
    bool known = false;
    if (all || suite == "forms") known = true, forms_suite(t, plan, out);
    if (all || suite == "legendre") known = true, legendre_suite(t, plan, out);
    if (all || suite == "noether") known = true, noether_suite(t, plan, out);
    if (all || suite == "bracket") known = true, bracket_suite(t, plan, out);
    if (all || suite == "transitivity") known = true, transitivity_suite(t, plan, out);
    if (!known) throw std::invalid_argument("unknown suite '" + suite + "'");
    return out;
}

}  // namespace mfc
