#include "doctest.h"

#include "mfc/frontend.hpp"
#include "mfc/numverify.hpp"
#include "mfc/report.hpp"
#include "mfc/theories.hpp"

using namespace mfc;

namespace {

std::string builtin(const std::string& name) {
    for (const auto& [n, src] : builtin_theory_files())
        if (n == name) return src;
    FAIL("no built-in file " << name);
    return {};
}

// write a report, reparse its JSON text, rebuild through the resolver
Json reread(const Report& rep) { return Json::parse(rep.document().dump()); }

}  // namespace

TEST_CASE("structured reports round-trip expressions and forms") {
    for (const auto& [file, src] : builtin_theory_files()) {
        CAPTURE(file);
        Theory t = load_theory(src);
        const JetBundle& jb = *t.bundle;
        LegendreResult lr = legendre(jb, t.L);
        DiffForm th = cartan_form(jb, t.L);
        Report rep("derive", t.name);
        rep.add("lagrangian", t.L);
        rep.add("covariant_hamiltonian", lr.p);
        rep.add("cartan_form", th);
        Json doc = reread(rep);
        CHECK(doc["schema_version"] == kReportSchemaVersion);
        CHECK(doc["theory"] == t.name);
        SymbolResolver r(doc);
        CHECK(r.expr(doc["lagrangian"]["expr"]) == t.L);
        CHECK(r.expr(doc["covariant_hamiltonian"]["expr"]) == lr.p);
        CHECK(r.form(doc["cartan_form"]["form"]) == th);
    }
}

TEST_CASE("round trip covers function symbols, sqrt atoms and metric symbols") {
    Theory t = load_theory(builtin("polyakov.thy"));
    Theory rp = load_theory(builtin("relativistic_particle.thy"));
    Expr L = t.L + rp.L;
    bool has_fn = false, has_sqrt = false;
    for (const auto& term : L.terms())
        for (const auto& [id, k] : term.m) {
            (void)k;
            AtomInfo a = atom(id);
            has_sqrt = has_sqrt || a.is_sqrt;
            if (!a.is_sqrt && a.d.rule == Rule::Function) has_fn = true;
        }
    CHECK(has_fn);
    CHECK(has_sqrt);
    Report rep("derive", t.name);
    rep.add("lagrangian", L);
    Json doc = reread(rep);
    CHECK_FALSE(doc["metrics"].empty());
    CHECK(SymbolResolver(doc).expr(doc["lagrangian"]["expr"]) == L);
}

TEST_CASE("malformed documents are rejected") {
    Json doc = {{"schema_version", kReportSchemaVersion}, {"metrics", Json::array()}, {"symbols", Json::array()}};
    SymbolResolver r(doc);
    CHECK_THROWS_AS(r.expr(Json::array({Json{{"c", "1"}, {"m", Json::array({Json::array({3, 1})})}}})),
                    ReportFormatError);
    CHECK_THROWS_AS(r.expr(Json::array({Json{{"c", "x/y"}, {"m", Json::array()}}})), ReportFormatError);
}

TEST_CASE("unicode display") {
    Theory t = load_theory(builtin("maxwell.thy"));
    const JetBundle& jb = *t.bundle;
    CHECK(display_symbol(jb.y(0)) == "A₀");
    CHECK(display(Expr()) == "0");
    CHECK(display(Expr::sym(jb.v(1, 2)) * Expr(Rational(2))).find("·") != std::string::npos);
}

TEST_CASE("verify_identity") {
    VerifyPlan plan;
    SUBCASE("zero against zero") {
        plan.tol = 1e-12;
        auto r = verify_identity(Expr(), Expr(), plan);
        CHECK(r.passed);
        CHECK(r.max_deviation == 0);
    }
    SUBCASE("x against x + 1 fails and reports the deviation") {
        SymbolId x = free_symbol("vx_report", {});
        auto r = verify_identity(Expr::sym(x), Expr::sym(x) + Expr(Rational(1)), plan);
        CHECK_FALSE(r.passed);
        CHECK(r.max_deviation > 1e-3);
        CHECK(r.worst_sample >= 0);
        CHECK(r.rhs_at_worst - r.lhs_at_worst == doctest::Approx(1.0));
        CHECK(r.detail.find("max deviation") != std::string::npos);
    }
    SUBCASE("equal expressions written differently") {
        SymbolId x = free_symbol("vy_report", {});
        Expr a = (Expr::sym(x) + Expr(Rational(1))) * (Expr::sym(x) - Expr(Rational(1)));
        auto r = verify_identity(a, Expr::sym(x) * Expr::sym(x) - Expr(Rational(1)), plan);
        CHECK(r.passed);
    }
}

TEST_CASE("finite differences on Maxwell multimomenta") {
    Theory t = load_theory(builtin("maxwell.thy"));
    const JetBundle& jb = *t.bundle;
    VerifyPlan plan{50, 1e-6, 3};
    for (int A = 0; A < 4; ++A)
        for (int mu = 0; mu < 4; ++mu) {
            CAPTURE(A);
            CAPTURE(mu);
            auto r = finite_difference_check(t.L, jb.v(A, mu), plan);
            CHECK(r.passed);
            CHECK_FALSE(r.skipped);
            CHECK(r.max_deviation <= 1e-6);
        }
    // the covariant Hamiltonian is quadratic in the velocities
    LegendreResult lr = legendre(jb, t.L);
    auto r = finite_difference_check(lr.p, jb.v(1, 2), plan);
    CHECK(r.passed);
}

TEST_CASE("finite differences skip undetermined functions") {
    Theory t = load_theory(builtin("polyakov.thy"));
    const JetBundle& jb = *t.bundle;
    auto r = finite_difference_check(t.L, jb.y(0), VerifyPlan{});
    CHECK(r.passed);
    CHECK(r.skipped);
    // a derivative the function does not depend on is still checked
    auto q = finite_difference_check(t.L, jb.v(0, 1), VerifyPlan{});
    CHECK(q.passed);
    CHECK_FALSE(q.skipped);
}
