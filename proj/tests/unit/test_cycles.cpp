#include "doctest.h"

#include "hqm/cycles.hpp"
#include "support/multipoly.hpp"

#include <random>

using namespace hqm;

namespace {

FTuple rand_tuple(const QuadField& k, int g, int n, std::mt19937& rng) {
    std::uniform_int_distribution<int> d(-3, 3);
    FTuple t(g, std::vector<FieldElem>(n));
    for (auto& v : t)
        for (auto& x : v) x = k.elem(d(rng), d(rng));
    return t;
}

std::vector<RingPtr> rings() {
    return {CohRing::make(make_field(1), {1}),        CohRing::make(make_field(1), {1, 1}),
            CohRing::make(make_field(3), {1, 2}),     CohRing::make(make_field(2), {1, 1, 1}),
            CohRing::make(make_field(1), {1, 2, 3}),  CohRing::make(make_field(3), {1, 1, 1, 1})};
}

}  // namespace

TEST_CASE("cycle function specializes to the wedge of f") {
    std::mt19937 rng(11);
    for (auto& r : rings()) {
        int n = r->n();
        for (int g = 0; g <= n; ++g) {
            auto Z = cycle_class_fn(r, g);
            for (int s = 0; s < 4; ++s) {
                auto t = rand_tuple(r->field(), g, n, rng);
                auto z = cycle_class(r, t);
                CHECK(Z.evaluate(t) == z);
                CHECK(gram_det_class(r, t) == z * Coef(factorial(g)));
                CHECK(z.is_rational());
            }
        }
    }
}

TEST_CASE("Laplacian powers of the cycle function") {
    for (auto& r : rings()) {
        int n = r->n();
        for (int g = 1; g <= n; ++g) {
            auto Z = cycle_class_fn(r, g);
            for (int i = 0; i < g; ++i) Z = Z.lower();
            auto Dg = power(class_D(r), g);
            CohClass val(r);
            for (auto& [k, p] : Z.data) val.add_term(k.first, k.second, p.coeffs().at(0));
            CHECK(val == Dg);
            Rat gf = factorial(g);
            CHECK(full_laplacian_power(r, g) == Dg * Coef(gf * gf));
        }
    }
}

TEST_CASE("adjoint identity and intertwining") {
    for (auto& r : rings())
        for (int g = 0; g < r->n(); ++g) {
            auto rep = delta_adjoint_check(r, g, 6, 5 + g);
            CHECK_MESSAGE(rep.pass, (rep.mismatches.empty() ? "" : rep.mismatches.front()));
            CHECK(rep.checked > 6);
        }
}

TEST_CASE("Lefschetz decomposition of the cycle function") {
    std::mt19937 rng(12);
    for (auto& r : rings()) {
        int n = r->n();
        for (int g = 0; g <= n; ++g) {
            auto tab = decompose_cycle_function(r, g);
            CHECK(tab.entries.size() == binomial(n, g) * binomial(n, g));
            CHECK(tab.reassemble() == cycle_class_fn(r, g));
            for (auto& e : tab.entries) {
                CHECK(e.w.is_rational());
                CHECK(apply_F(e.w).is_zero());
                CHECK(e.p_top.genus() == e.ell);
                if (e.ell > 0) CHECK(e.p_top.lower().is_zero());
                CHECK(e.p_top.raise(g - e.ell) == e.p_raised);
            }
            auto corr = corrected_fn(r, g);
            bool has_top = 2 * g <= n;
            for (int s = 0; s < 3; ++s) {
                auto t = rand_tuple(r->field(), g, n, rng);
                auto c = corr.evaluate(t);
                if (!has_top) CHECK(c.is_zero());
                CHECK(apply_F(c).is_zero());
                CHECK(corrected_class(r, t) == c);
            }
        }
    }
}

TEST_CASE("codimension one correction") {
    std::mt19937 rng(13);
    for (auto& r : rings()) {
        int n = r->n();
        if (n < 2) continue;
        for (int s = 0; s < 5; ++s) {
            auto t = rand_tuple(r->field(), 1, n, rng);
            auto c = corrected_class_codim1(r, t[0]);
            CHECK(c == corrected_class(r, t));
            CHECK(apply_F(c).is_zero());
            CHECK(apply_F(cycle_class(r, t)) == one_class(r) * Coef(herm_diag(r, t[0], t[0])));
        }
    }
    // f(e_1) on a product of two curves: corrected = Y_1 - D/2
    auto r = CohRing::make(make_field(1), {1, 1});
    auto c = corrected_class_codim1(r, {FieldElem(1), FieldElem(0)});
    CHECK(c == class_Y(r, 0) - class_D(r) * Coef(Rat(1, 2)));
}

TEST_CASE("u map pairs with the volume class") {
    auto r = CohRing::make(make_field(3), {1, 2, 1});
    for (int g = 0; g <= 3; ++g) {
        auto u = u_map(r, g, power(class_D(r), 3 - g));
        if (g == 0) CHECK(u == FPoly::one(r->family()) * Coef(6 * 2));
        CHECK(u.lower(g).coeffs().size() == 1);
        if (g > 0) CHECK_FALSE(u.is_zero());
    }
    CHECK_THROWS(cycle_class_fn(r, 4));
}

TEST_CASE("corrected pairing polynomials are pluriharmonic") {
    for (auto& r : {CohRing::make(make_field(1), {1, 1}), CohRing::make(make_field(3), {1, 2, 1}),
                    CohRing::make(make_field(1), {1, 1, 1, 1})}) {
        int n = r->n();
        auto M = linalg::inverse(r->family()->gram().transpose());
        for (int g = 1; 2 * g <= n; ++g) {
            auto corr = corrected_fn(r, g);
            for (auto& alpha : rational_hodge_basis(r, n - g)) {
                auto p = corr.pair(alpha);
                CHECK(p.lower().is_zero());
                auto ex = oracle::expand(p);
                for (int col = 0; col < g; ++col) CHECK(oracle::column_laplacian(ex, col, M).terms.empty());
            }
        }
    }
}
