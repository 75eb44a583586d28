#include "hqm/boundary.hpp"

#include "hqm/thetagen.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <set>
#include <stdexcept>

namespace hqm {

namespace {

using IV = std::pair<Int, Int>;  // a + b w

Int to_int(const Rat& x) {
    if (x.get_den() != 1) throw std::invalid_argument("expected an algebraic integer");
    return x.get_num();
}

IV coords(const FieldElem& x) { return {to_int(x.a()), to_int(x.b())}; }

struct NormForm {
    Int t, n;  // w^2 = t w - n
    explicit NormForm(const QuadField& k) : t(omega_trace(k.d)), n(to_int(omega_norm(k.d))) {}
    Int norm(const IV& v) const { return v.first * v.first + t * v.first * v.second + n * v.second * v.second; }
    Int pair2(const IV& u, const IV& v) const {  // 2 B(u, v)
        return 2 * u.first * v.first + t * (u.first * v.second + u.second * v.first) + 2 * n * u.second * v.second;
    }
    IV times_w(const IV& v) const { return {-v.second * n, v.first + v.second * t}; }
};

// Z-basis (rows) of the ideal generated by xs
IMatrix ideal_rows(const QuadField& k, const std::vector<FieldElem>& xs) {
    NormForm nf(k);
    IMatrix a(2 * xs.size(), 2);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        IV v = coords(xs[i]), w = nf.times_w(v);
        a(2 * i, 0) = v.first;
        a(2 * i, 1) = v.second;
        a(2 * i + 1, 0) = w.first;
        a(2 * i + 1, 1) = w.second;
    }
    return a;
}

Int round_div(const Int& a, const Int& b) {
    // nearest integer to a / b, b > 0
    Int q;
    Int num = 2 * a + b, den = 2 * b;
    mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    return q;
}

Int common_den(const Vec& v);

FieldElem generator(const QuadField& k, const std::vector<FieldElem>& xs_in) {
    Int den = common_den(xs_in);
    std::vector<FieldElem> xs = xs_in;
    for (auto& x : xs) x *= FieldElem(Rat(den));
    auto h = hnf(ideal_rows(k, xs));
    if (h.rank == 0) return FieldElem(0);
    if (h.rank != 2) throw std::logic_error("ideal of rank one");
    NormForm nf(k);
    IV u{h.h(0, 0), h.h(0, 1)}, v{h.h(1, 0), h.h(1, 1)};
    Int index = abs(h.h(0, 0) * h.h(1, 1) - h.h(0, 1) * h.h(1, 0));
    for (;;) {
        if (nf.norm(u) > nf.norm(v)) std::swap(u, v);
        Int mu = round_div(nf.pair2(u, v), 2 * nf.norm(u));
        if (mu == 0) break;
        v = {v.first - mu * u.first, v.second - mu * u.second};
    }
    if (nf.norm(u) != index) throw std::invalid_argument("class number > 1 unsupported");
    Rat a(u.first), b(u.second);
    a /= den;
    b /= den;
    return k.elem(a, b);
}

void require_pid(const QuadField& k) {
    if (!k.class_number_one()) throw std::invalid_argument("class number > 1 unsupported");
}

bool is_unit_elem(const FieldElem& u) { return u.is_integral() && u.norm() == 1; }

Vec mat_col(const Matrix<FieldElem>& m, std::size_t j) { return m.col(j); }

Int common_den(const Vec& v) {
    Int den = 1;
    for (auto& x : v) {
        den = lcm(den, x.a().get_den());
        den = lcm(den, x.b().get_den());
    }
    return den;
}

Rat rat_lcm(const Rat& x, const Rat& y) {
    Rat r(lcm(x.get_num(), y.get_num()));
    r /= gcd(x.get_den(), y.get_den());
    return r;
}

}  // namespace

namespace ok {

Bezout bezout(const QuadField& k, const FieldElem& a, const FieldElem& b) {
    FieldElem g = generator(k, {a, b});
    if (g.is_zero()) return {FieldElem(0), FieldElem(1), FieldElem(0)};
    IMatrix rows = ideal_rows(k, {a, b});
    auto sol = solve_in_row_lattice(rows, {to_int(g.a()), to_int(g.b())});
    if (!sol) throw std::logic_error("generator not in ideal");
    const auto& s = *sol;
    FieldElem x = k.elem(Rat(s[0]), Rat(s[1])), y = k.elem(Rat(s[2]), Rat(s[3]));
    if (x * a + y * b != g) throw std::logic_error("bezout identity failed");
    return {g, x, y};
}

bool is_primitive(const QuadField& k, const Vec& v) {
    auto h = hnf(ideal_rows(k, v));
    return h.rank == 2 && abs(h.h(0, 0) * h.h(1, 1) - h.h(0, 1) * h.h(1, 0)) == 1;
}

Matrix<FieldElem> reduce_row(const QuadField& k, const Vec& v, FieldElem* gcd) {
    require_pid(k);
    std::size_t n = v.size();
    auto U = Matrix<FieldElem>::identity(n);
    Vec w = v;
    for (std::size_t j = 1; j < n; ++j) {
        if (w[j].is_zero()) continue;
        if (w[0].is_zero()) {
            std::swap(w[0], w[j]);
            for (std::size_t i = 0; i < n; ++i) std::swap(U(i, 0), U(i, j));
            continue;
        }
        auto bz = bezout(k, w[0], w[j]);
        FieldElem p = -(w[j] / bz.g), q = w[0] / bz.g;
        for (std::size_t i = 0; i < n; ++i) {
            FieldElem c0 = U(i, 0), cj = U(i, j);
            U(i, 0) = bz.x * c0 + bz.y * cj;
            U(i, j) = p * c0 + q * cj;
        }
        w[0] = bz.g;
        w[j] = FieldElem(0);
    }
    if (gcd) *gcd = w[0];
    return U;
}

}  // namespace ok

HermLattice hyperbolic_sum(const QuadField& k, const Matrix<FieldElem>& m) {
    std::size_t n = m.rows();
    Matrix<FieldElem> g(n + 2, n + 2);
    g(0, 1) = k.delta();
    g(1, 0) = k.delta().conj();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) g(i + 2, j + 2) = m(i, j);
    return HermLattice(k, g);
}

std::vector<Vec> find_isotropic(const HermLattice& L, long bound) {
    std::size_t n = L.rank();
    if (L.neg_index() != 1 || L.pos_index() != static_cast<int>(n) - 1)
        throw std::invalid_argument("find_isotropic needs signature (n+1, 1)");
    const auto& k = L.field();
    // numeric prefilter; nonzero values of h(x, x) are bounded below by 1 / (denominator of the gram)
    std::vector<std::complex<double>> gnum(n * n);
    std::complex<double> w(omega_trace(k.d) / 2.0, std::sqrt(omega_norm(k.d).get_d() - omega_trace(k.d) * omega_trace(k.d) / 4.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const auto& x = L.gram()(i, j);
            gnum[i * n + j] = x.a().get_d() + w * x.b().get_d();
        }
    std::vector<std::pair<long, long>> vals;
    for (long a = -bound; a <= bound; ++a)
        for (long b = -bound; b <= bound; ++b) vals.push_back({a, b});
    std::size_t nv = vals.size();
    std::vector<std::size_t> idx(n, 0);
    auto units = k.units();
    std::set<Vec> seen;
    std::vector<Vec> out;
    std::vector<std::complex<double>> x(n);
    for (;;) {
        bool nonzero = false;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = static_cast<double>(vals[idx[i]].first) + w * static_cast<double>(vals[idx[i]].second);
            if (vals[idx[i]].first || vals[idx[i]].second) nonzero = true;
        }
        if (nonzero) {
            std::complex<double> s = 0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) s += x[i] * gnum[i * n + j] * std::conj(x[j]);
            if (std::abs(s) < 1e-6) {
                Vec e(n);
                for (std::size_t i = 0; i < n; ++i) e[i] = k.elem(Rat(vals[idx[i]].first), Rat(vals[idx[i]].second));
                if (L.h(e, e).is_zero() && ok::is_primitive(k, e)) {
                    Vec best;
                    for (auto& u : units) {
                        Vec c = e;
                        for (auto& y : c) y *= u;
                        if (best.empty() || c < best) best = c;
                    }
                    if (seen.insert(best).second) out.push_back(best);
                }
            }
        }
        std::size_t p = 0;
        while (p < n && ++idx[p] == nv) idx[p++] = 0;
        if (p == n) break;
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

struct Elimination {
    Matrix<FieldElem> basis;  // u, e, m_1..m_n
    FieldElem content;
};

Elimination eliminate(const HermLattice& L, const Vec& e) {
    const auto& k = L.field();
    require_pid(k);
    std::size_t n = L.rank();
    if (e.size() != n) throw std::invalid_argument("isotropic vector has wrong length");
    for (auto& x : e)
        if (!x.is_integral()) throw std::invalid_argument("isotropic vector must lie in L");
    if (!L.h(e, e).is_zero()) throw std::invalid_argument("vector is not isotropic");
    if (!ok::is_primitive(k, e)) throw std::invalid_argument("isotropic vector is not primitive");
    // phi(x) = h(x, e) = sum_i x_i v_i
    Vec v(n, FieldElem(0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) v[i] += L.gram()(i, j) * e[j].conj();
    Int den = common_den(v);
    Vec vi = v;
    for (auto& x : vi) x *= FieldElem(Rat(den));
    FieldElem g;
    auto U = ok::reduce_row(k, vi, &g);
    g /= FieldElem(Rat(den));
    // kernel columns 1..n-1; write e in them and extend to a basis
    Matrix<FieldElem> K(n, n - 1);
    for (std::size_t j = 1; j < n; ++j) K.set_col(j - 1, mat_col(U, j));
    auto Uinv = linalg::inverse(U);
    Vec c(n - 1);
    auto y = Uinv.apply(e);
    if (!y[0].is_zero()) throw std::logic_error("isotropic vector not in its own orthogonal complement");
    for (std::size_t j = 1; j < n; ++j) c[j - 1] = y[j];
    FieldElem unit;
    auto V = ok::reduce_row(k, c, &unit);
    if (!is_unit_elem(unit)) throw std::logic_error("isotropic vector is not primitive in J^perp");
    // W = (V^T)^{-1} diag(unit, 1, ...) has first column c
    auto W = linalg::inverse(V.transpose());
    for (std::size_t i = 0; i < n - 1; ++i) W(i, 0) *= unit;
    auto KW = K * W;
    Elimination out;
    out.basis = Matrix<FieldElem>(n, n);
    out.basis.set_col(0, mat_col(U, 0));
    for (std::size_t j = 0; j + 1 < n; ++j) out.basis.set_col(j + 1, mat_col(KW, j));
    if (out.basis.col(1) != e) throw std::logic_error("basis extension lost the isotropic vector");
    out.content = g;
    return out;
}

}  // namespace

std::pair<HermLattice, Matrix<FieldElem>> quotient_lattice(const HermLattice& L, const Vec& e) {
    auto el = eliminate(L, e);
    std::size_t n = L.rank(), m = n - 2;
    Matrix<FieldElem> G(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) G(i, j) = L.h(el.basis.col(i + 2), el.basis.col(j + 2));
    // projection: L coordinates -> M coordinates on J^perp
    auto inv = linalg::inverse(el.basis);
    Matrix<FieldElem> P(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) P(i, j) = inv(i + 2, j);
    return {HermLattice(L.field(), G), P};
}

Rat compute_rJ(const HermLattice& L, const Vec& e) {
    const auto& k = L.field();
    auto D = dual_basis(L);
    FieldElem di = k.delta().inverse();
    Rat r = 0;
    for (std::size_t j = 0; j < L.rank(); ++j) {
        FieldElem c = L.h(D.basis.col(j), e) * di;
        for (const Rat& q : {c.a(), c.b()}) {
            if (sgn(q) == 0) continue;
            Rat inv = abs(q);
            inv = 1 / inv;
            r = sgn(r) == 0 ? inv : rat_lcm(r, inv);
        }
    }
    if (sgn(r) == 0) throw std::invalid_argument("degenerate isotropic vector");
    return r;
}

Vec BoundaryData::project(const Vec& x) const {
    auto y = basis_inv.apply(x);
    if (!y[0].is_zero()) throw std::invalid_argument("vector is not orthogonal to J");
    return Vec(y.begin() + 2, y.end());
}

bool BoundaryData::orthogonal_to_HJ(std::size_t nu) const {
    for (auto j : HJ)
        if (sgn(DL.bilinear(nu, j)) != 0) return false;
    return true;
}

BoundaryData analyze_boundary(const HermLattice& L, const Vec& e) {
    if (L.neg_index() != 1 || L.pos_index() != static_cast<int>(L.rank()) - 1)
        throw std::invalid_argument("boundary data need signature (n+1, 1)");
    BoundaryData bd;
    bd.L = L;
    bd.e = e;
    auto el = eliminate(L, e);
    bd.basis = el.basis;
    bd.basis_inv = linalg::inverse(el.basis);
    bd.content = el.content;
    bd.M = quotient_lattice(L, e).first;
    bd.rJ = compute_rJ(L, e);
    bd.DL = DiscGroup(L);
    bd.DM = DiscGroup(bd.M);
    // J_k cap L^dual = t0 O_k e, t0 = 1 / (delta gamma), (gamma) = h(e, L)
    const auto& k = L.field();
    std::vector<FieldElem> he;
    for (std::size_t i = 0; i < L.rank(); ++i) {
        Vec b(L.rank(), FieldElem(0));
        b[i] = FieldElem(1);
        he.push_back(L.h(e, b));
    }
    FieldElem gamma = generator(k, he);
    FieldElem t0 = (k.delta() * gamma).inverse();
    std::set<std::size_t> H{0};
    std::vector<std::size_t> gens;
    for (const FieldElem& t : {t0, t0 * k.omega()}) {
        Vec v = e;
        for (auto& x : v) x *= t;
        gens.push_back(bd.DL.index_of(v));
    }
    std::vector<std::size_t> frontier{0};
    while (!frontier.empty()) {
        std::vector<std::size_t> next;
        for (auto a : frontier)
            for (auto g : gens) {
                auto s = bd.DL.add(a, g);
                if (H.insert(s).second) next.push_back(s);
            }
        frontier = std::move(next);
    }
    bd.HJ.assign(H.begin(), H.end());
    return bd;
}

std::optional<std::size_t> arrow_up_lift(const BoundaryData& bd, const Vec& lambda) {
    if (!bd.L.in_dual(lambda)) throw std::invalid_argument("lift is not in the dual lattice");
    FieldElem s = bd.L.h(lambda, bd.e) / bd.content;
    if (!s.is_integral()) return std::nullopt;
    Vec lp = lambda;
    auto u = bd.basis.col(0);
    for (std::size_t i = 0; i < lp.size(); ++i) lp[i] -= s * u[i];
    return bd.DM.index_of(bd.project(lp));
}

std::optional<std::size_t> arrow_up(const BoundaryData& bd, std::size_t nu) {
    return arrow_up_lift(bd, bd.DL.rep_vector(nu));
}

Correction assemble_correction(const BoundaryData& bd, int g, const std::vector<std::size_t>& cosets,
                               const Matrix<FieldElem>& N, unsigned workers) {
    int n = static_cast<int>(bd.M.rank());
    if (g < 1 || 2 * g > n) throw std::invalid_argument("need 1 <= g and 2g <= n");
    if (cosets.size() != static_cast<std::size_t>(g)) throw std::invalid_argument("need one coset per vector");
    if (N.rows() != static_cast<std::size_t>(g) || N.cols() != static_cast<std::size_t>(g) || !is_hermitian(N) ||
        !is_psd(N))
        throw std::invalid_argument("N must be Hermitian positive semidefinite g x g");
    Correction out;
    for (auto nu : cosets) {
        if (nu >= bd.DL.order()) throw std::invalid_argument("coset index out of range");
        auto a = arrow_up(bd, nu);
        if (!a) return out;
        out.arrow.push_back(*a);
    }
    out.supported = true;
    auto ring = ring_for(bd.M);
    auto tab = decompose_cycle_function(ring, g);
    EnumOptions opt;
    opt.workers = workers;
    auto tuples = enumerate_tuples(bd.M, bd.DM, N, out.arrow, opt);
    out.tuples = tuples.size();
    std::vector<FTuple> ft;
    for (auto& t : tuples) {
        FTuple x;
        for (auto& v : t) x.push_back(v.x);
        ft.push_back(std::move(x));
    }
    Rat scale = bd.rJ;
    scale /= bd.L.field().disc;
    for (auto& e : tab.entries) {
        if (e.ell >= g) continue;
        Coef s(Rat(0));
        for (auto& x : ft) s += e.p_raised.evaluate(x);
        out.terms.push_back({e.ell, e.index, g - e.ell - 1, s * Coef(scale), e.w});
    }
    return out;
}

}  // namespace hqm
