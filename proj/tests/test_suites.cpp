#include "doctest.h"

#include <fstream>
#include <sstream>

#include "mfc/frontend.hpp"
#include "mfc/suites.hpp"

using namespace mfc;

namespace {

std::string corrupted_source() {
    std::ifstream in(MFC_TEST_DATA "/maxwell_corrupted.thy");
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("every suite passes on every shipped file") {
    VerifyPlan plan{20, 1e-9, 7};
    for (const auto& [file, src] : builtin_theory_files()) {
        Theory t = load_theory(src);
        auto res = run_suite(t, "all", plan);
        CHECK(res.size() > 10);
        for (const auto& c : res) {
            CAPTURE(file);
            CAPTURE(c.suite);
            CAPTURE(c.name);
            CAPTURE(c.detail);
            CHECK(c.passed);
        }
    }
}

TEST_CASE("unknown suite names are rejected") {
    Theory t = load_theory(builtin_theory_files().front().second);
    CHECK_THROWS_AS(run_suite(t, "nope", VerifyPlan{}), std::invalid_argument);
}

TEST_CASE("check_equal falls back to numeric evaluation") {
    SymbolId x = free_symbol("suite_x");
    Expr a = Expr::sym(x);
    auto exact = check_equal("s", "n", a, a, VerifyPlan{});
    CHECK(exact.passed);
    CHECK(exact.detail == "exact");
    auto bad = check_equal("s", "n", a, a + Expr(1), VerifyPlan{});
    CHECK_FALSE(bad.passed);
}

TEST_CASE("on-shell conservation") {
    VerifyPlan plan{20, 1e-9, 7};
    SUBCASE("gauge symmetry of Maxwell is exact") {
        Theory t;
        for (const auto& [f, src] : builtin_theory_files())
            if (f == "maxwell.thy") t = load_theory(src);
        auto v = on_shell_conservation(t, t.generator("gauge"), plan);
        CHECK(v.conserved);
        CHECK(v.exact);
    }
    SUBCASE("the corrupted field strength breaks it, and says so") {
        Theory t = load_theory(corrupted_source());
        auto v = on_shell_conservation(t, t.generator("gauge"), plan);
        CHECK_FALSE(v.conserved);
        CHECK(v.detail.find("Eq. 4D.9") != std::string::npos);
        bool failed = false;
        for (const auto& c : run_suite(t, "noether", plan)) failed = failed || !c.passed;
        CHECK(failed);
    }
}
