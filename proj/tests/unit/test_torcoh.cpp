#include "doctest.h"

#include "hqm/torcoh.hpp"

#include <random>

using namespace hqm;

namespace {

std::vector<Coef> cvec(const std::vector<FieldElem>& v) { return {v.begin(), v.end()}; }

std::vector<FieldElem> random_vec(const QuadField& k, int n, std::mt19937& rng) {
    std::uniform_int_distribution<int> d(-4, 4);
    std::vector<FieldElem> v(n);
    for (auto& x : v) x = k.elem(d(rng), d(rng));
    return v;
}

CohClass fq(const RingPtr& r, const std::vector<FieldElem>& v) { return f_quad(r, cvec(v)); }

}  // namespace

TEST_CASE("basic classes") {
    auto k = make_field(1);
    auto r = CohRing::make(k, {1, 1});
    auto y1 = class_Y(r, 0);
    CHECK(y1.coeff(1, 1) == Coef(r->c()));
    CHECK(r->c() * k.delta() == FieldElem(-1));
    // c = i / sqrt(d_k): for d = 1, i/2
    CHECK(r->c() == k.elem(0, Rat(1, 2)));
    auto r2 = CohRing::make(make_field(3), {2, 3});
    CHECK(class_Y(r2, 1).coeff(2, 2) == Coef(r2->c() * FieldElem(9)));
    CHECK(class_D(r) == class_Y(r, 0) + class_Y(r, 1));
    CHECK(class_D(r2) == class_Y(r2, 0) * Coef(Rat(1, 2)) + class_Y(r2, 1) * Coef(Rat(1, 3)));
    for (auto x : {class_Y(r2, 0), class_Yplus(r2, 0, 1), class_Yminus(r2, 0, 1), class_D(r2)}) CHECK(x.is_rational());
    CHECK_FALSE((class_Y(r2, 0) * Coef(r2->field().omega())).is_rational());
    CHECK(r2->bidegree_basis(1, 1).size() == 4);
    auto r3 = CohRing::make(k, {1, 1, 1});
    for (int p = 0; p <= 3; ++p)
        for (int q = 0; q <= 3; ++q) CHECK(r3->bidegree_basis(p, q).size() == binomial(3, p) * binomial(3, q));
    CHECK_THROWS(CohRing::make(k, {1, 0}));
}

TEST_CASE("f_quad examples") {
    std::mt19937 rng(1);
    for (long d : {1L, 3L, 2L}) {
        auto k = make_field(d);
        auto r = CohRing::make(k, {1, 2, 3});
        for (int t = 0; t < 20; ++t) {
            auto v = random_vec(k, 3, rng);
            auto u = k.elem(1, 1);
            std::vector<FieldElem> uv(v);
            for (auto& x : uv) x *= u;
            CHECK(fq(r, uv) == fq(r, v) * Coef(FieldElem(u.norm())));
            CHECK(wedge(fq(r, v), fq(r, v)).is_zero());
            CHECK(f_sesq(r, cvec(v), cvec(v)) == fq(r, v));
            auto w = random_vec(k, 3, rng);
            auto s = k.elem(2, -1);
            std::vector<Coef> sv = cvec(v);
            for (auto& x : sv) x *= Coef(s);
            CHECK(f_sesq(r, sv, cvec(w)) == f_sesq(r, cvec(v), cvec(w)) * Coef(s));
            CHECK(f_sesq(r, cvec(w), sv) == f_sesq(r, cvec(w), cvec(v)) * Coef(s.conj()));
        }
    }
    auto k1 = make_field(1);
    auto r = CohRing::make(k1, {1, 1});
    CHECK(fq(r, {FieldElem(1), FieldElem(1)}) == class_Y(r, 0) + class_Y(r, 1) - class_Yplus(r, 0, 1));
    auto e1 = cvec({FieldElem(1), FieldElem(0)}), e2 = cvec({FieldElem(0), FieldElem(1)});
    CHECK(wedge(f_sesq(r, e1, e2), f_sesq(r, e2, e1)) == -wedge(f_quad(r, e1), f_quad(r, e2)));
}

TEST_CASE("Y decomposition of f(lambda)") {
    std::mt19937 rng(2);
    for (long d : {1L, 3L}) {
        auto k = make_field(d);
        for (auto a : {std::vector<long>{1}, std::vector<long>{1, 1}, std::vector<long>{1, 2, 3}}) {
            auto r = CohRing::make(k, a);
            for (int t = 0; t < 25; ++t) {
                auto v = random_vec(k, r->n(), rng);
                CHECK(from_y_decomposition(r, y_decomposition(r, v)) == fq(r, v));
            }
        }
    }
}

TEST_CASE("wedge and integrate") {
    std::mt19937 rng(3);
    auto k = make_field(3);
    auto r = CohRing::make(k, {1, 2, 2});
    CohClass prod = one_class(r);
    for (int l = 0; l < 3; ++l) prod = wedge(prod, class_Y(r, l));
    CHECK(prod.integrate() == Coef(1 * 4 * 4));
    CHECK(volume_class(r).integrate() == Coef(1));
    CHECK(power(class_D(r), 3).integrate() == Coef(6 * 1 * 2 * 2));
    auto r2 = CohRing::make(make_field(1), {1, 1});
    CHECK(power(class_D(r2), 2).integrate() == Coef(2));
    CHECK(class_D(r2).integrate() == Coef(0));
    // graded commutativity on random mixed-degree monomials
    auto r4 = CohRing::make(k, {1, 1, 1, 1});
    std::uniform_int_distribution<int> m(0, 15);
    for (int t = 0; t < 200; ++t) {
        CohClass x(r4), y(r4);
        Mask a = m(rng), b = m(rng), c = m(rng), e = m(rng);
        x.add_term(a, b, Coef(1));
        y.add_term(c, e, Coef(1));
        int dx = popcount(a) + popcount(b), dy = popcount(c) + popcount(e);
        CohClass yx = wedge(y, x);
        CHECK(wedge(x, y) == ((dx * dy) % 2 ? -yx : yx));
    }
}

TEST_CASE("GL2 rule and cycle product rule") {
    std::mt19937 rng(4);
    auto k = make_field(1);
    auto r = CohRing::make(k, {1, 2, 1});
    for (int t = 0; t < 10; ++t) {
        auto l1 = random_vec(k, 3, rng), l2 = random_vec(k, 3, rng);
        auto co = random_vec(k, 4, rng);
        FieldElem u = co[0], v = co[1], s = co[2], w = co[3];
        std::vector<FieldElem> a(3), b(3);
        for (int i = 0; i < 3; ++i) {
            a[i] = u * l1[i] + v * l2[i];
            b[i] = s * l1[i] + w * l2[i];
        }
        FieldElem det = u * w - v * s;
        CHECK(wedge(fq(r, a), fq(r, b)) == wedge(fq(r, l1), fq(r, l2)) * Coef(FieldElem(det.norm())));

        for (int rr = 1; rr <= 3; ++rr) {
            std::vector<std::vector<FieldElem>> ls;
            for (int i = 0; i < rr; ++i) ls.push_back(random_vec(k, 3, rng));
            CohClass cyc = one_class(r), quads = one_class(r);
            for (int i = 0; i < rr; ++i) {
                cyc = wedge(cyc, f_sesq(r, cvec(ls[i]), cvec(ls[(i + 1) % rr])));
                quads = wedge(quads, fq(r, ls[i]));
            }
            CHECK(cyc == ((rr - 1) % 2 ? -quads : quads));
        }
    }
}

TEST_CASE("Lefschetz sl2 on cohomology") {
    auto k = make_field(1);
    for (int n = 1; n <= 4; ++n) {
        std::vector<long> a(n, 1);
        if (n == 3) a = {1, 2, 3};
        auto r = CohRing::make(k, a);
        for (int par = 0; par < 2; ++par) CHECK(check_sl2(r->lefschetz(par).mod).pass);
        // hard Lefschetz
        for (int g = 0; 2 * g <= n; ++g) {
            auto basis = r->bidegree_basis(g, g);
            auto top = r->bidegree_basis(n - g, n - g);
            Matrix<Coef> m(top.size(), basis.size());
            auto Dp = power(class_D(r), n - 2 * g);
            for (std::size_t c = 0; c < basis.size(); ++c) {
                CohClass x(r);
                x.add_term(basis[c].first, basis[c].second, Coef(1));
                m.set_col(c, wedge(Dp, x).to_vector(top));
            }
            CHECK(linalg::rank(m) == basis.size());
        }
    }
    auto r3 = CohRing::make(k, {1, 1, 1});
    CHECK(r3->lefschetz(0).mod.weight[1] == -1);
    CHECK(apply_F(class_D(r3)) == one_class(r3) * Coef(3));
    auto D = class_D(r3);
    CHECK(apply_E(apply_F(D)) - apply_F(apply_E(D)) == D * Coef(-1));
}

TEST_CASE("rational and primitive Hodge bases") {
    auto k = make_field(3);
    auto r = CohRing::make(k, {1, 1});
    auto b0 = rational_hodge_basis(r, 0);
    REQUIRE(b0.size() == 1);
    CHECK(b0[0] == one_class(r));
    auto b1 = rational_hodge_basis(r, 1);
    CHECK(b1.size() == 4);
    for (auto& x : b1) CHECK(x.is_rational());
    auto p1 = primitive_hodge_basis(r, 1);
    CHECK(p1.size() == 3);
    for (auto& w : p1) {
        CHECK(apply_F(w).is_zero());
        CHECK(w.is_rational());
    }
    CHECK(primitive_hodge_basis(r, 2).empty());
    CHECK(primitive_hodge_basis(r, 0).size() == 1);

    auto r4 = CohRing::make(make_field(1), {1, 2, 1, 1});
    auto p2 = primitive_hodge_basis(r4, 2);
    CHECK(p2.size() == 36 - 16);
    for (auto& w : p2) {
        CHECK(apply_F(w).is_zero());
        CHECK(w.is_rational());
    }
    CHECK(rational_hodge_basis(r4, 2).size() == 36);
}
