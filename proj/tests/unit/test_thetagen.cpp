#include "doctest.h"

#include "hqm/thetagen.hpp"

using namespace hqm;

namespace {

Cplx C(const char* re, const char* im) { return Cplx(Real(re), Real(im)); }

CMatrix tau1(const char* re, const char* im) {
    CMatrix t(1, 1);
    t(0, 0) = C(re, im);
    return t;
}

CMatrix generic_tau2() {
    CMatrix t(2, 2);
    t(0, 0) = C("0.1", "1.0");
    t(1, 1) = C("-0.1", "1.05");
    t(0, 1) = C("0.05", "0.1");
    t(1, 0) = C("0.02", "-0.07");
    return t;
}

std::vector<Channel> cycle_channels(const RingPtr& ring, int g) {
    auto Z = cycle_class_fn(ring, g);
    std::vector<Channel> ch;
    for (auto& key : ring->bidegree_basis(g, g)) ch.push_back({"", Z.data.at(key)});
    return ch;
}

Cplx det_num(const std::vector<std::vector<Cplx>>& V, const Subset& rows, const Subset& cols) {
    std::size_t m = rows.size();
    CMatrix a(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) a(i, j) = V[rows[i]][cols[j]];
    return m == 0 ? Cplx(Real(1)) : det(a);
}

// completed series term by term: det(Y)^-1 sum_r (-1/4pi)^r (lower^r P)(U conj(Y^{1/2})) q^N,
// a genus-m polynomial evaluated on n x g input summed over its m-column minors
std::vector<Cplx> completed_oracle(const ThetaData& td, const FPoly& P, const CMatrix& tau) {
    const auto& k = td.lattice().field();
    int g = td.genus();
    std::size_t n = td.lattice().rank();
    CMatrix Y(g, g);
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) Y(i, j) = (tau(i, j) - tau(j, i).conj()) * Cplx(Real(0), Real("-0.5"));
    CMatrix R = hermitian_sqrt(Y);
    for (auto& x : R.v) x = x.conj();
    Real detY = det(Y).re;
    std::vector<FPoly> lowered{P};
    for (int r = 1; r <= g; ++r) lowered.push_back(lowered.back().lower());
    std::vector<Cplx> out(td.rep().dim());
    for (auto& cell : td.cells()) {
        Cplx tr;
        for (int i = 0; i < g; ++i)
            for (int j = 0; j < g; ++j) tr += tau(i, j) * embed(cell.N(j, i), k, 128);
        Real tp = 2 * real_pi();
        Cplx q = cexp(Cplx(-tp * tr.im, tp * tr.re));
        for (std::size_t t = 0; t < cell.count; ++t) {
            auto tup = td.tuple(cell, t);
            std::vector<std::vector<Cplx>> V(n, std::vector<Cplx>(g));
            for (std::size_t s = 0; s < n; ++s)
                for (int j = 0; j < g; ++j)
                    for (int l = 0; l < g; ++l) V[s][j] += embed(tup[l][s], k, 128) * R(l, j);
            Cplx val;
            for (int r = 0; r <= g; ++r) {
                const auto& Q = lowered[r];
                int m = g - r;
                const auto& subs = Q.family()->subsets(m);
                Cplx part;
                for (auto& J : combinations(g, m))
                    for (std::size_t a = 0; a < subs.size(); ++a)
                        for (std::size_t b = 0; b < subs.size(); ++b) {
                            const Coef& c = Q.coeffs()[Q.family()->index(m, a, b)];
                            if (c.is_zero()) continue;
                            part += embed(c, k, 128) * det_num(V, subs[a], J) * det_num(V, subs[b], J).conj();
                        }
                val += part * Cplx(pow(-1 / (4 * real_pi()), static_cast<long>(r)));
            }
            out[cell.component] += val * q * Cplx(1 / detY);
        }
    }
    return out;
}

}  // namespace

TEST_CASE("q-expansion coefficients in genus one") {
    auto k = make_field(1);
    auto L = diagonal_lattice(k, {1});
    auto fam = FFamily::make(k, L.gram());
    SeriesSpec s;
    s.kind = SeriesSpec::Kind::weighted;
    s.lattice = L;
    s.g = 1;
    s.poly = FPoly::one(fam).raise();
    ThetaData td(L, 1, Rat(4));
    auto q = qexp(s, td);
    CHECK(q.weight == 3);
    bool seen = false;
    for (auto& c : q.coefficients) {
        const auto& v = std::get<Coef>(c.value);
        // P = h(lambda, lambda) is constant N on each cell
        Rat cnt = 0;
        for (auto& cell : td.cells())
            if (cell.cosets == c.cosets && cell.N == c.N) cnt = Rat(static_cast<long>(cell.count));
        CHECK(v == Coef(c.N(0, 0) * FieldElem(cnt)));
        if (c.cosets[0] == 0 && c.N(0, 0) == FieldElem(1)) {
            CHECK(v == Coef(4));  // the four units
            seen = true;
        }
    }
    CHECK(seen);
    CHECK(check_n_compatibility(q, L));
}

TEST_CASE("cycle and corrected q-expansions") {
    auto k = make_field(1);
    auto L = diagonal_lattice(k, {1, 1});
    auto ring = ring_for(L);
    ThetaData td(L, 1, Rat(3));
    SeriesSpec cy;
    cy.kind = SeriesSpec::Kind::cycles;
    cy.lattice = L;
    cy.g = 1;
    SeriesSpec co = cy;
    co.kind = SeriesSpec::Kind::corrected;
    auto qc = qexp(cy, td), qo = qexp(co, td);
    REQUIRE(qc.coefficients.size() == qo.coefficients.size());
    CohClass D = class_D(ring);
    for (std::size_t i = 0; i < qc.coefficients.size(); ++i) {
        const auto& a = std::get<CohClass>(qc.coefficients[i].value);
        const auto& b = std::get<CohClass>(qo.coefficients[i].value);
        const auto& N = qc.coefficients[i].N;
        if (N(0, 0).is_zero()) CHECK(a.is_zero());
        Rat cnt = static_cast<long>(td.cells()[i].count);
        CHECK(b == a - D * Coef(N(0, 0) * FieldElem(Rat(cnt / 2))));
        CHECK(apply_F(b).is_zero());
    }
    CHECK(check_n_compatibility(qc, L));
}

TEST_CASE("Cauchy-Binet evaluation matches the square-root oracle") {
    PrecisionGuard pg(128);
    auto k = make_field(1);
    auto L = diagonal_lattice(k, {1, 1});
    auto ring = ring_for(L);
    ThetaData td(L, 2, Rat(2), 2);
    auto tau = generic_tau2();
    auto ch = cycle_channels(ring, 2);
    auto val = eval_series(td, ch, tau, true, 128);
    for (std::size_t c = 0; c < ch.size(); c += 5) {
        auto o = completed_oracle(td, ch[c].poly, tau);
        for (std::size_t i = 0; i < o.size(); ++i) CHECK((o[i] - val.values[c][i]).abs() < Real(1e-30));
    }
}

TEST_CASE("completion splits into holomorphic part and phi") {
    PrecisionGuard pg(128);
    auto k = make_field(1);
    auto L = diagonal_lattice(k, {1, 1});
    auto ring = ring_for(L);
    ThetaData td(L, 2, Rat(2), 2);
    auto tau = generic_tau2();
    auto ch = cycle_channels(ring, 2);
    auto A = eval_series(td, ch, tau, true, 128);
    auto H = eval_series(td, ch, tau, false, 128);
    auto B = eval_phi_series(ring, td, tau, 128);
    Real res = 0;
    for (std::size_t c = 0; c < ch.size(); ++c)
        for (std::size_t i = 0; i < A.values[c].size(); ++i) {
            Real e = (A.values[c][i] - H.values[c][i] - B.values[c][i]).abs();
            if (e > res) res = e;
        }
    CHECK(res < Real(1e-30));
}

TEST_CASE("functional equations in genus one") {
    auto k = make_field(1);
    auto L = diagonal_lattice(k, {1});
    auto fam = FFamily::make(k, L.gram());
    SeriesSpec s;
    s.kind = SeriesSpec::Kind::completed;
    s.lattice = L;
    s.g = 1;
    s.poly = FPoly::one(fam).raise();
    ThetaData td(L, 1, Rat(16));
    auto ch = series_channels(s);

    auto r = check_functional_equation(td, ch, true, GroupGen::w_gen(), tau1("0", "1"), 1e-8, 128);
    CHECK(r.pass);
    CHECK(r.residual < 1e-20);
    r = check_functional_equation(td, ch, false, GroupGen::w_gen(), tau1("0", "1"), 1e-8, 128);
    CHECK_FALSE(r.pass);
    CHECK(r.residual > 1e-2);
    // away from the fixed point
    r = check_functional_equation(td, ch, true, GroupGen::w_gen(), tau1("0.2", "1.1"), 1e-8, 128);
    CHECK(r.pass);
    CHECK(r.residual < 1e-15);

    Matrix<FieldElem> B(1, 1);
    B(0, 0) = FieldElem(1);
    r = check_functional_equation(td, ch, true, GroupGen::n_gen(B), tau1("0.3", "0.9"), 1e-8, 128);
    CHECK(r.residual < 1e-30);
    Matrix<FieldElem> A(1, 1);
    A(0, 0) = k.omega();
    r = check_functional_equation(td, ch, true, GroupGen::m_gen(A), tau1("0.3", "0.9"), 1e-8, 128);
    CHECK(r.residual < 1e-30);
}

TEST_CASE("corrected series with test classes is holomorphic modular") {
    auto k = make_field(1);
    SeriesSpec c;
    c.kind = SeriesSpec::Kind::corrected;
    c.lattice = diagonal_lattice(k, {1, 1});
    c.g = 1;
    c.test_classes = true;
    auto r = check_functional_equation(c, GroupGen::w_gen(), tau1("0", "1"), Rat(30));
    CHECK(r.pass);
    CHECK(r.tail_bound < 1e-12);
    CHECK_FALSE(r.completed);
    r = check_functional_equation(c, GroupGen::w_gen(), tau1("0.15", "1.2"), Rat(30));
    CHECK(r.pass);
    CHECK(r.residual < 1e-8);
}

TEST_CASE("genus two functional equations") {
    auto k = make_field(1);
    auto L = diagonal_lattice(k, {1, 1});
    auto ring = ring_for(L);
    ThetaData td(L, 2, Rat(3), 4);
    auto ch = cycle_channels(ring, 2);
    auto tau = generic_tau2();
    for (auto& x : tau.v) x = Cplx(x.re, x.im * 3);
    Matrix<FieldElem> A(2, 2);
    A(0, 0) = FieldElem(1);
    A(0, 1) = k.omega();
    A(1, 1) = FieldElem(1);
    Matrix<FieldElem> Ad(2, 2);
    Ad(0, 0) = k.omega();
    Ad(1, 1) = FieldElem(1);
    Matrix<FieldElem> B(2, 2);
    B(0, 0) = FieldElem(1);
    B(0, 1) = k.elem(1, 1);
    B(1, 0) = k.elem(1, -1);
    for (bool completed : {false, true}) {
        auto r = check_functional_equation(td, ch, completed, GroupGen::m_gen(Ad), tau, 1e-8, 128);
        CHECK(r.residual < 1e-30);
        r = check_functional_equation(td, ch, completed, GroupGen::m_gen(A), tau, 1e-8, 128);
        CHECK(r.residual < 1e-9);
        r = check_functional_equation(td, ch, completed, GroupGen::n_gen(B), tau, 1e-8, 128);
        CHECK(r.residual < 1e-30);
    }
}

TEST_CASE("tail bounds are sound") {
    PrecisionGuard pg(128);
    auto k = make_field(3);
    auto L = diagonal_lattice(k, {1, 2});
    auto ring = ring_for(L);
    auto ch = cycle_channels(ring, 1);
    auto tau = tau1("0.1", "0.8");
    ThetaData small(L, 1, Rat(3)), big(L, 1, Rat(12));
    for (bool completed : {false, true}) {
        auto a = eval_series(small, ch, tau, completed, 128);
        auto b = eval_series(big, ch, tau, completed, 128);
        CHECK(b.tail < a.tail);
        for (std::size_t c = 0; c < ch.size(); ++c)
            for (std::size_t i = 0; i < a.values[c].size(); ++i)
                CHECK((a.values[c][i] - b.values[c][i]).abs() <= a.tail + b.tail);
    }
}
