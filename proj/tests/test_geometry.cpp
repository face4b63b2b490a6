#include "doctest.h"

#include "gen_forms.hpp"
#include "mfc/geometry.hpp"

using namespace mfc;
using oracle::base_chart;

namespace {

// brute-force expansion of a form as a dense alternating array: value on every
// ordered index tuple of length degree
std::map<std::vector<int>, Expr> dense(const DiffForm& f) {
    std::map<std::vector<int>, Expr> out;
    for (auto& [w, c] : f.terms()) {
        std::vector<int> idx(w.begin(), w.end());
        std::sort(idx.begin(), idx.end());
        do {
            std::vector<int> perm = idx;
            // sign relative to the sorted tuple
            int s = oracle::levi_civita([&] {
                std::vector<int> r;
                for (int v : perm) r.push_back(int(std::find(idx.begin(), idx.end(), v) - idx.begin()));
                return r;
            }());
            out[perm] += s * c;
        } while (std::next_permutation(idx.begin(), idx.end()));
    }
    return out;
}

// wedge via the alternation formula on dense arrays
DiffForm wedge_oracle(const DiffForm& a, const DiffForm& b) {
    auto da = dense(a), db = dense(b);
    int p = a.degree(), q = b.degree();
    DiffForm r(a.chart(), p + q);
    for (auto& [ia, ca] : da)
        for (auto& [ib, cb] : db) {
            std::vector<int> all = ia;
            all.insert(all.end(), ib.begin(), ib.end());
            std::vector<int> s = all;
            std::sort(s.begin(), s.end());
            if (std::adjacent_find(s.begin(), s.end()) != s.end()) continue;
            if (!std::is_sorted(ia.begin(), ia.end()) || !std::is_sorted(ib.begin(), ib.end())) continue;
            std::vector<int> rel;
            for (int v : all) rel.push_back(int(std::find(s.begin(), s.end(), v) - s.begin()));
            r += DiffForm::monomial(a.chart(), oracle::levi_civita(rel) * ca * cb, s);
        }
    return r;
}

}  // namespace

TEST_CASE("wedge antisymmetry and the volume identity") {
    auto c = base_chart(4);
    auto d0 = DiffForm::dcoord(c, 0), d1 = DiffForm::dcoord(c, 1);
    CHECK((wedge(d0, d1) + wedge(d1, d0)).is_zero());
    for (int nu = 0; nu < 4; ++nu)
        for (int mu = 0; mu < 4; ++mu) {
            DiffForm lhs = wedge(DiffForm::dcoord(c, nu), volume_n(c, mu));
            DiffForm rhs = nu == mu ? volume(c) : DiffForm(c, 4);
            CHECK(lhs == rhs);
        }
}

TEST_CASE("wedge matches the alternation oracle and is associative") {
    for (int n = 1; n <= 4; ++n) {
        auto c = base_chart(n, 1, "w" + std::to_string(n));
        oracle::ExprGen g(100 + n, c->coords());
        g.with_sqrt = false;
        for (int t = 0; t < 10; ++t) {
            int p = g.pick(n + 1), q = g.pick(n + 2 - p);
            auto a = oracle::random_form(g, c, p), b = oracle::random_form(g, c, q);
            CHECK(wedge(a, b) == wedge_oracle(a, b));
            int r = g.pick(std::max(1, n + 2 - p - q));
            auto e = oracle::random_form(g, c, r);
            CHECK(wedge(wedge(a, b), e) == wedge(a, wedge(b, e)));
        }
    }
}

TEST_CASE("exterior derivative") {
    auto c = base_chart(4);
    CHECK(exterior_d(DiffForm::monomial(c, Expr(3), {0, 2})).is_zero());
    // d(V^mu d^n x_mu) = d_mu V^mu d^{n+1}x
    oracle::ExprGen g(7, c->coords());
    std::vector<Expr> V;
    DiffForm cur(c, 3);
    Expr div;
    for (int mu = 0; mu < 4; ++mu) {
        V.push_back(g.gen(3));
        cur += V[mu] * volume_n(c, mu);
        div += diff(V[mu], c->coord(mu));
    }
    CHECK(exterior_d(cur) == div * volume(c));
    for (int n = 1; n <= 4; ++n) {
        auto ch = base_chart(n, 2, "d" + std::to_string(n));
        oracle::ExprGen gg(200 + n, ch->coords());
        for (int t = 0; t < 50 / 4 + 1; ++t) {
            auto a = oracle::random_form(gg, ch, gg.pick(ch->dim()));
            CHECK(exterior_d(exterior_d(a)).is_zero());
        }
    }
}

TEST_CASE("interior product") {
    auto c = base_chart(4);
    for (int mu = 0; mu < 4; ++mu) {
        // explicit (-1)^mu dx^0 ^ .. (omit mu) .. ^ dx^3
        std::vector<int> idx;
        for (int i = 0; i < 4; ++i)
            if (i != mu) idx.push_back(i);
        CHECK(volume_n(c, mu) == DiffForm::monomial(c, Expr(mu % 2 ? -1 : 1), idx));
        for (int nu = 0; nu < 4; ++nu) CHECK(volume_nm1(c, mu, nu) == -volume_nm1(c, nu, mu));
    }
    CHECK(volume_nm1(c, 1, 1).is_zero());
    CHECK_THROWS_AS(interior(VectorField::coordinate(c, 0), DiffForm::function(c, Expr(1))), DegreeZero);
    for (int n = 1; n <= 4; ++n) {
        auto ch = base_chart(n, 1, "i" + std::to_string(n));
        oracle::ExprGen g(300 + n, ch->coords());
        g.with_sqrt = false;
        for (int t = 0; t < 10; ++t) {
            std::vector<Expr> comps;
            for (int i = 0; i < ch->dim(); ++i) comps.push_back(g.gen(2));
            VectorField v(ch, comps);
            int p = 1 + g.pick(ch->dim());
            auto a = oracle::random_form(g, ch, p);
            auto b = oracle::random_form(g, ch, g.pick(ch->dim() - p + 1));
            DiffForm lhs = interior(v, wedge(a, b));
            DiffForm rhs = wedge(interior(v, a), b);
            if (b.degree() > 0) rhs += (p % 2 ? -1 : 1) * wedge(a, interior(v, b));
            CHECK(lhs == rhs);
            CHECK(interior(v, interior(v, a.degree() >= 2 ? a : wedge(a, DiffForm::dcoord(ch, 0)))).is_zero());
        }
    }
}

TEST_CASE("degree above dimension vanishes") {
    auto c = base_chart(2);
    auto d0 = DiffForm::dcoord(c, 0), d1 = DiffForm::dcoord(c, 1);
    CHECK(wedge(wedge(d0, d1), d0).is_zero());
    CHECK(exterior_d(volume(c)).is_zero());
}

TEST_CASE("pullback: identity, functoriality, naturality of d") {
    for (int n = 1; n <= 4; ++n) {
        auto src = base_chart(n, 0);
        auto tgt = base_chart(n, 2, "p" + std::to_string(n));
        oracle::ExprGen g(400 + n, src->coords());
        g.with_sqrt = false;
        oracle::ExprGen gt(500 + n, tgt->coords());
        gt.with_sqrt = false;
        auto id = ChartMap::identity(tgt);
        for (int t = 0; t < 13; ++t) {
            ChartMap m{src, tgt, {}, std::nullopt, {}};
            for (int i = 0; i < tgt->dim(); ++i) m.components.push_back(g.gen(2));
            auto a = oracle::random_form(gt, tgt, gt.pick(std::min(tgt->dim(), n + 1)));
            CHECK(pullback(id, a) == a);
            CHECK(pullback(m, exterior_d(a)) == exterior_d(pullback(m, a)));
            // k: tgt -> tgt polynomial, then m
            ChartMap k{tgt, tgt, {}, std::nullopt, {}};
            for (int i = 0; i < tgt->dim(); ++i)
                k.components.push_back(Expr::sym(tgt->coord(i)) + (i % 2 ? gt.gen(1) : Expr()));
            CHECK(pullback(compose(k, m), a) == pullback(m, pullback(k, a)));
        }
    }
}

TEST_CASE("Lie derivative") {
    auto c = base_chart(3, 1, "l");
    oracle::ExprGen g(600, c->coords());
    g.with_sqrt = false;
    std::vector<Expr> comps;
    for (int i = 0; i < c->dim(); ++i) comps.push_back(g.gen(2));
    VectorField v(c, comps);
    Expr f = g.gen(3);
    CHECK(lie_derivative(v, DiffForm::function(c, f)) == interior(v, exterior_d(DiffForm::function(c, f))));

    // translation flow x^0 -> x^0 + lambda: (eta^* a - a)/lambda against the Lie derivative
    auto a = oracle::random_form(g, c, 2);
    VectorField t0 = VectorField::coordinate(c, 0);
    DiffForm L = lie_derivative(t0, a);
    std::mt19937_64 rng(9);
    const double lam = 1e-5;
    for (int s = 0; s < 10; ++s) {
        Assignment as = sample_assignment({}, rng, c->coords());
        for (auto& [w, coef] : a.terms()) {
            Assignment shifted = as;
            shifted.set(c->coord(0), as.get(c->coord(0)) + lam);
            double fd = (eval_numeric(coef, shifted) - eval_numeric(coef, as)) / lam;
            CHECK(fd == doctest::Approx(eval_numeric(L.coeff(w), as)).epsilon(1e-4));
        }
    }
}

TEST_CASE("chart mismatch is reported") {
    auto a = base_chart(2), b = base_chart(3);
    CHECK_THROWS_AS(wedge(DiffForm::dcoord(a, 0), DiffForm::dcoord(b, 0)), ChartMismatch);
}
