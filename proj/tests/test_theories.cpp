#include "doctest.h"

#include <set>

#include "mfc/theories.hpp"

using namespace mfc;

TEST_CASE("every expected object matches the engine") {
    for (const auto& e : catalog()) {
        CHECK_NOTHROW(validate(e.theory));
        for (const auto& [key, want] : e.expected) {
            CAPTURE(e.id);
            CAPTURE(key);
            Comparison c = compare_expected(derive_expected(e.theory, key), want);
            CHECK(c.equal);
            if (c.numeric_fallback) MESSAGE("numeric fallback (tol 1e-9): " << e.id << " " << key);
        }
    }
}

TEST_CASE("catalog shape") {
    auto cat = catalog();
    REQUIRE(cat.size() == 6);
    std::set<std::string> ids;
    for (const auto& e : cat) ids.insert(e.id);
    CHECK(ids.size() == 6);
    CHECK_THROWS_AS(cat[0].at("no.such.key"), std::out_of_range);
    CHECK_THROWS_AS(derive_expected(cat[0].theory, "no_such_key"), std::out_of_range);
    CHECK_THROWS(make_polyakov_string(0));

    auto pm = make_particle_mechanics(3);
    CHECK(pm.bundle->fiber_dim() == 3);
    CHECK_FALSE(pm.meta.parametrized);
    CHECK(make_relativistic_particle().meta.parametrized);
    CHECK(make_relativistic_particle().meta.metric == MetricKind::None);
    CHECK(make_maxwell(true).meta.metric == MetricKind::Fixed);
    CHECK(make_maxwell(false).meta.metric == MetricKind::Parametric);
    CHECK(make_polyakov_string(2).meta.metric == MetricKind::Variational);
    CHECK(make_chern_simons().meta.parametrized);
}

TEST_CASE("Levi-Civita sign") {
    CHECK(levi_civita_sign({0, 1, 2}) == 1);
    CHECK(levi_civita_sign({1, 0, 2}) == -1);
    CHECK(levi_civita_sign({2, 0, 1}) == 1);
    CHECK(levi_civita_sign({0, 0, 1}) == 0);
    CHECK(levi_civita_sign({3, 2, 1, 0}) == 1);
}

TEST_CASE("larger sizes") {
    for (int N : {1, 3}) {
        auto e = particle_mechanics_entry(N);
        for (const auto& [key, want] : e.expected) {
            CAPTURE(key);
            CHECK(compare_expected(derive_expected(e.theory, key), want).equal);
        }
    }
    auto s = polyakov_string_entry(3);
    for (const auto& [key, want] : s.expected) {
        CAPTURE(key);
        CHECK(compare_expected(derive_expected(s.theory, key), want).equal);
    }
}
