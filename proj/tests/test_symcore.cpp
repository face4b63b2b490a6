#include "doctest.h"

#include <thread>

#include "mfc/expr.hpp"
#include "oracles.hpp"

using namespace mfc;

namespace {

Expr S(const std::string& n) { return Expr::sym(free_symbol(n)); }

// v_{nu mu} = d_mu A_nu as plain symbols for the brute-force checks
SymbolId vsym(int nu, int mu) { return free_symbol("vt", {nu, mu}); }

void ensure_g4() { register_metric({"g", 4, 1, false}); }

}  // namespace

TEST_CASE("power rule and expansion cancel") {
    Expr v = S("v");
    CHECK(diff(v * v, free_symbol("v")) == 2 * v);
    Expr a = S("a"), b = S("b");
    CHECK((pow(a + b, 2) - a * a - 2 * a * b - b * b).is_zero());
    CHECK(equal_symbolic(pow(a + b, 2), a * a + 2 * a * b + b * b));
}

TEST_CASE("substitution is simultaneous") {
    Expr x = S("x"), y = S("y");
    CHECK(substitute(x + y, {{free_symbol("y"), x}}) == 2 * x);
    CHECK(substitute(x * y, {{free_symbol("x"), y}, {free_symbol("y"), x}}) == x * y);
    oracle::ExprGen gen(3, {free_symbol("x"), free_symbol("y")});
    for (int i = 0; i < 20; ++i) {
        Expr e = gen.gen(3);
        CHECK(substitute(e, {{free_symbol("x"), x}}) == e);
    }
}

TEST_CASE("epsilon contraction against index enumeration") {
    // eps^{mu nu sig} F_{mu nu} with F_{mu nu} = v_{nu mu} - v_{mu nu}, n+1 = 3
    for (int sig = 0; sig < 3; ++sig) {
        Expr lhs, rhs;
        for (int mu = 0; mu < 3; ++mu)
            for (int nu = 0; nu < 3; ++nu) {
                int e = oracle::levi_civita({mu, nu, sig});
                Expr F = Expr::sym(vsym(nu, mu)) - Expr::sym(vsym(mu, nu));
                lhs += e * F;
                rhs += 2 * e * Expr::sym(vsym(nu, mu));
            }
        CHECK(lhs == rhs);
        CHECK(lhs.size() == 2);
    }
}

TEST_CASE("canonicalize is idempotent") {
    oracle::ExprGen gen(11, {free_symbol("x"), free_symbol("y"), free_symbol("z")});
    for (int i = 0; i < 100; ++i) {
        Expr e = gen.gen(4);
        Expr c = canonicalize(e);
        CHECK(canonicalize(c) == c);
        CHECK(c == e);
    }
}

TEST_CASE("eval_numeric") {
    Assignment a;
    a.set(free_symbol("x"), 3.0);
    CHECK(eval_numeric(pow(S("x"), 2), a) == 9.0);
    Expr a1 = S("a"), b1 = S("b");
    CHECK(eval_numeric(pow(a1 + b1, 2) - a1 * a1 - 2 * a1 * b1 - b1 * b1, Assignment{}) == 0.0);
    CHECK_THROWS_AS(eval_numeric(S("unbound_q"), Assignment{}), UnboundSymbol);
    a.set(free_symbol("y"), -2.0);
    CHECK_THROWS_AS(eval_numeric(sqrt(S("y")), a), NegativeRadicand);
}

TEST_CASE("Maxwell covariant Hamiltonian at Minkowski against a direct loop") {
    ensure_g4();
    auto gi = [](int a, int b) { return Expr::sym(inverse_metric_symbol("g", a, b)); };
    Expr sg = Expr::sym(sqrt_neg_det_symbol("g"));
    Expr FF;
    for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n)
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) {
                    Expr Fmn = Expr::sym(vsym(n, m)) - Expr::sym(vsym(m, n));
                    Expr Fab = Expr::sym(vsym(b, a)) - Expr::sym(vsym(a, b));
                    FF += Fmn * Fab * gi(m, a) * gi(n, b);
                }
    Expr p = scale(FF * sg, Rational(1, 4));

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 5; ++trial) {
        Assignment as;
        double v[4][4];
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) as.set(vsym(i, j), v[i][j] = u(rng));
        for (int i = 0; i < 4; ++i)
            for (int j = i; j < 4; ++j) as.set(metric_symbol("g", i, j), oracle::minkowski(i, j));
        as.refresh_metrics();
        double direct = 0;
        for (int m = 0; m < 4; ++m)
            for (int n = 0; n < 4; ++n) {
                double Fl = v[n][m] - v[m][n];
                double Fu = oracle::minkowski(m, m) * oracle::minkowski(n, n) * Fl;
                direct += 0.25 * Fl * Fu;
            }
        CHECK(eval_numeric(p, as) == doctest::Approx(direct).epsilon(1e-13));
    }
}

TEST_CASE("equal_numeric") {
    ensure_g4();
    auto gi = [](int a, int b) { return Expr::sym(inverse_metric_symbol("g", a, b)); };
    // F^{mu nu} raised explicitly, then contracted, vs. the precontracted quadruple sum
    Expr raised, pre;
    for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n) {
            Expr Fmn = Expr::sym(vsym(n, m)) - Expr::sym(vsym(m, n));
            Expr Fup;
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) {
                    Expr Fab = Expr::sym(vsym(b, a)) - Expr::sym(vsym(a, b));
                    Fup += gi(m, a) * gi(n, b) * Fab;
                    pre += gi(m, a) * gi(n, b) * Fmn * Fab;
                }
            raised += Fmn * Fup;
        }
    CHECK(equal_numeric(raised, pre, 20, 1e-9, 1));
    CHECK(equal_numeric(S("x"), S("x"), 5, 1e-12, 2));
    CHECK_FALSE(equal_numeric(S("x"), S("x") + Expr(Rational(1, 1000)), 5, 1e-9, 3));
}

TEST_CASE("derivative matches central differences") {
    ensure_g4();
    std::vector<SymbolId> xs{free_symbol("x"), free_symbol("y"), free_symbol("z")};
    oracle::ExprGen gen(21, xs);
    for (int i = 0; i < 30; ++i) {
        Expr e = gen.gen(3);
        for (SymbolId s : xs) CHECK(oracle::fd_max_rel_error(e, s, 50, 100 + i) <= 1e-6);
    }
    // derived metric symbols through the registered rules
    auto gi = [](int a, int b) { return Expr::sym(inverse_metric_symbol("g", a, b)); };
    Expr sg = Expr::sym(sqrt_neg_det_symbol("g"));
    Expr e = gi(0, 1) * gi(2, 3) * sg + gi(1, 1) * S("x") + pow(sg, 3) * gi(0, 0);
    for (int a = 0; a < 4; ++a)
        for (int b = a; b < 4; ++b) CHECK(oracle::fd_max_rel_error(e, metric_symbol("g", a, b), 50, 7) <= 1e-6);
}

TEST_CASE("diff is linear, Leibniz, and partials commute") {
    std::vector<SymbolId> xs{free_symbol("x"), free_symbol("y"), free_symbol("z")};
    oracle::ExprGen gen(31, xs);
    for (int i = 0; i < 100; ++i) {
        Expr a = gen.gen(3), b = gen.gen(3);
        SymbolId s = xs[i % 3], t = xs[(i + 1) % 3];
        CHECK(diff(a + 3 * b, s) == diff(a, s) + 3 * diff(b, s));
        CHECK(equal_symbolic(diff(a * b, s), diff(a, s) * b + a * diff(b, s)));
        CHECK(equal_symbolic(diff(diff(a, s), t), diff(diff(a, t), s)));
    }
}

TEST_CASE("symbolic equality implies numeric equality") {
    std::vector<SymbolId> xs{free_symbol("x"), free_symbol("y")};
    oracle::ExprGen gen(41, xs);
    for (int i = 0; i < 30; ++i) {
        Expr a = gen.gen(3);
        Expr b = canonicalize(a * Expr(2) - a);
        REQUIRE(equal_symbolic(a, b));
        CHECK(equal_numeric(a, b, 5, 1e-9, i));
    }
}

TEST_CASE("registered metric rules are consistent with g g^-1 = 1") {
    for (int dim : {2, 3, 4}) {
        std::string name = "gm" + std::to_string(dim);
        register_metric({name, dim, 1, false});
        for (int mu = 0; mu < dim; ++mu)
            for (int sig = 0; sig < dim; ++sig) {
                Expr id(mu == sig ? -1 : 0);
                for (int nu = 0; nu < dim; ++nu)
                    id += Expr::sym(metric_symbol(name, mu, nu)) * Expr::sym(inverse_metric_symbol(name, nu, sig));
                CHECK(metric_reduce(id).is_zero());
                for (int a = 0; a < dim; ++a)
                    for (int b = a; b < dim; ++b) {
                        Expr d = diff(id, metric_symbol(name, a, b));
                        CHECK(equal_symbolic(d, Expr()));
                    }
            }
    }
}

TEST_CASE("symmetric index pairs intern to one symbol") {
    register_metric({"g", 4, 1, false});
    CHECK(metric_symbol("g", 1, 2) == metric_symbol("g", 2, 1));
    CHECK(inverse_metric_symbol("g", 3, 0) == inverse_metric_symbol("g", 0, 3));
    SymbolDesc d;
    d.family = "phi";
    d.field = true;
    d.variational = true;
    d.kind = SymKind::FiberCoord;
    SymbolId y = intern(d);
    CHECK(jet_successor(jet_successor(y, 2), 1) == jet_successor(jet_successor(y, 1), 2));
    CHECK(desc(jet_successor(y, 0)).kind == SymKind::Multivelocity);
}

TEST_CASE("interning is safe under concurrency") {
    std::vector<std::thread> ts;
    std::vector<std::vector<SymbolId>> out(8);
    for (int t = 0; t < 8; ++t)
        ts.emplace_back([t, &out] {
            for (int i = 0; i < 500; ++i) out[t].push_back(free_symbol("conc", {i % 97, i % 13}));
        });
    for (auto& t : ts) t.join();
    for (int t = 1; t < 8; ++t) CHECK(out[t] == out[0]);
}

TEST_CASE("sqrt atoms") {
    Expr x = S("x");
    Expr r = sqrt(x * x + 1);
    CHECK(r * r == x * x + 1);
    CHECK(sqrt(Expr(Rational(9, 4))) == Expr(Rational(3, 2)));
    CHECK(equal_symbolic(diff(r, free_symbol("x")), x * pow(r, -1)));
}
