#include "hqm/cycles.hpp"

#include <random>
#include <sstream>
#include <stdexcept>

namespace hqm {

namespace {

std::vector<Coef> to_coef(const std::vector<FieldElem>& v) { return {v.begin(), v.end()}; }

void check_tuple(const RingPtr& r, const FTuple& t) {
    for (auto& v : t)
        if (v.size() != static_cast<std::size_t>(r->n())) throw std::invalid_argument("vector length must equal n");
}

CohClass mono(const RingPtr& r, const MonoKey& k) {
    CohClass x(r);
    x.add_term(k.first, k.second, Coef(1));
    return x;
}

// c^g (-1)^{g(g-1)/2}
Coef kappa(const RingPtr& r, int g) {
    FieldElem c(1);
    for (int i = 0; i < g; ++i) c *= r->c();
    Coef k(c);
    return (g * (g - 1) / 2) % 2 ? -k : k;
}

FTuple random_tuple(const QuadField& k, int count, int n, std::mt19937& rng) {
    std::uniform_int_distribution<int> d(-3, 3);
    FTuple t(count, std::vector<FieldElem>(n));
    for (auto& v : t)
        for (auto& x : v) x = k.elem(d(rng), d(rng));
    return t;
}

}  // namespace

FieldElem herm_diag(const RingPtr& r, const std::vector<FieldElem>& x, const std::vector<FieldElem>& y) {
    FieldElem s(0);
    for (int l = 0; l < r->n(); ++l) s += FieldElem(r->a()[l]) * x.at(l) * y.at(l).conj();
    return s;
}

CohClass CycleClassFn::evaluate(const FTuple& t) const {
    if (t.size() != static_cast<std::size_t>(g)) throw std::invalid_argument("tuple length must equal g");
    check_tuple(ring, t);
    CohClass x(ring);
    for (auto& [k, p] : data) x.add_term(k.first, k.second, p.evaluate(t));
    return x;
}

FPoly CycleClassFn::pair(const CohClass& alpha) const {
    FPoly out(ring->family(), g);
    for (auto& [k, p] : data) {
        Coef v = wedge(mono(ring, k), alpha).integrate();
        if (!v.is_zero()) out += p * v;
    }
    return out;
}

CycleClassFn CycleClassFn::lower() const {
    if (g == 0) throw std::invalid_argument("cannot lower genus 0");
    CycleClassFn out{ring, g - 1, {}};
    for (auto& [k, p] : data) {
        auto q = p.lower();
        if (!q.is_zero()) out.data.emplace(k, q);
    }
    return out;
}

CycleClassFn& CycleClassFn::operator-=(const CycleClassFn& o) {
    if (o.g != g) throw std::invalid_argument("genus mismatch");
    for (auto& [k, p] : o.data) {
        auto it = data.find(k);
        if (it == data.end()) it = data.emplace(k, FPoly(ring->family(), g)).first;
        it->second -= p;
        if (it->second.is_zero()) data.erase(it);
    }
    return *this;
}

bool CycleClassFn::operator==(const CycleClassFn& o) const {
    if (g != o.g) return false;
    auto nz = [](const CycleClassFn& f) {
        std::map<MonoKey, std::vector<Coef>> m;
        for (auto& [k, p] : f.data)
            if (!p.is_zero()) m.emplace(k, p.coeffs());
        return m;
    };
    return nz(*this) == nz(o);
}

CycleClassFn cycle_class_fn(const RingPtr& r, int g) {
    int n = r->n();
    if (g < 0 || g > n) throw std::invalid_argument("g out of range");
    const auto& fam = r->family();
    Coef kap = kappa(r, g);
    CycleClassFn out{r, g, {}};
    for (auto& S : fam->subsets(g)) {
        long aS = 1;
        for (int s : S) aS *= r->a()[s];
        for (auto& T : fam->subsets(g)) {
            long aT = 1;
            for (int t : T) aT *= r->a()[t];
            out.data.emplace(MonoKey{subset_to_mask(S), subset_to_mask(T)},
                             FPoly::basis(fam, g, S, T) * (kap * Coef(aS * aT)));
        }
    }
    return out;
}

CohClass cycle_class(const RingPtr& r, const FTuple& t) {
    check_tuple(r, t);
    CohClass x = one_class(r);
    for (auto& v : t) x = wedge(x, f_quad(r, to_coef(v)));
    return x;
}

CohClass gram_det_class(const RingPtr& r, const FTuple& t) {
    check_tuple(r, t);
    int g = static_cast<int>(t.size());
    std::vector<std::vector<CohClass>> m(g, std::vector<CohClass>(g));
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) m[i][j] = f_sesq(r, to_coef(t[i]), to_coef(t[j]));
    std::vector<int> perm(g);
    for (int i = 0; i < g; ++i) perm[i] = i;
    CohClass out(r);
    do {
        int inv = 0;
        for (int i = 0; i < g; ++i)
            for (int j = i + 1; j < g; ++j)
                if (perm[i] > perm[j]) ++inv;
        CohClass term = one_class(r);
        for (int i = 0; i < g && !term.is_zero(); ++i) term = wedge(term, m[i][perm[i]]);
        if (inv % 2) out -= term;
        else out += term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

FPoly u_map(const RingPtr& r, int g, const CohClass& alpha) { return cycle_class_fn(r, g).pair(alpha); }

CohClass full_laplacian_power(const RingPtr& r, int g) {
    auto Z = cycle_class_fn(r, g);
    // on functions of g columns with this symmetry, sum_i Delta_i = g * lower
    Rat scale = factorial(g) * factorial(g);
    for (int i = 0; i < g; ++i) Z = Z.lower();
    CohClass out(r);
    for (auto& [k, p] : Z.data) out.add_term(k.first, k.second, p.coeffs().at(0) * Coef(scale));
    return out;
}

CohClass DecompositionTable::component(const DecompEntry& e) const {
    return wedge(e.w, power(class_D(ring), g - e.ell));
}

CycleClassFn DecompositionTable::reassemble() const {
    CycleClassFn out{ring, g, {}};
    for (auto& e : entries) {
        auto comp = component(e);
        for (auto& [k, c] : comp.terms()) {
            auto it = out.data.find(k);
            if (it == out.data.end()) it = out.data.emplace(k, FPoly(ring->family(), g)).first;
            it->second += e.p_raised * c;
        }
    }
    for (auto it = out.data.begin(); it != out.data.end();)
        it = it->second.is_zero() ? out.data.erase(it) : std::next(it);
    return out;
}

DecompositionTable decompose_cycle_function(const RingPtr& r, int g) {
    int n = r->n();
    if (g < 0 || g > n) throw std::invalid_argument("g out of range");
    DecompositionTable tab{r, g, {}};
    auto basis = r->bidegree_basis(g, g);
    std::vector<DecompEntry> ents;
    std::vector<std::vector<Coef>> cols;
    CohClass D = class_D(r);
    for (int ell = 0; ell <= std::min(g, n - g); ++ell) {
        auto prim = primitive_hodge_basis(r, ell);
        CohClass Dp = power(D, g - ell);
        for (std::size_t i = 0; i < prim.size(); ++i) {
            ents.push_back({ell, static_cast<int>(i), prim[i], {}, {}});
            cols.push_back(wedge(prim[i], Dp).to_vector(basis));
        }
    }
    if (cols.size() != basis.size()) throw std::logic_error("adapted basis has wrong size");
    Matrix<Coef> B(basis.size(), cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) B.set_col(c, cols[c]);
    auto Binv = linalg::inverse(B);

    auto Z = cycle_class_fn(r, g);
    std::vector<const FPoly*> zc(basis.size(), nullptr);
    for (std::size_t m = 0; m < basis.size(); ++m) {
        auto it = Z.data.find(basis[m]);
        if (it != Z.data.end()) zc[m] = &it->second;
    }
    for (std::size_t e = 0; e < ents.size(); ++e) {
        auto& ent = ents[e];
        FPoly raised(r->family(), g);
        for (std::size_t m = 0; m < basis.size(); ++m)
            if (zc[m] && !Binv(e, m).is_zero()) raised += *zc[m] * Binv(e, m);
        int rr = g - ent.ell, mm = n - 2 * ent.ell;
        // Lambda^r F^r acts on the primitive piece of weight -mm by prod s(mm - s + 1)
        Rat scale(1);
        for (int s = 1; s <= rr; ++s) scale *= Rat(s * (mm - s + 1));
        FPoly top = raised.lower(rr) * Coef(Rat(1) / scale);
        if (top.raise(rr) != raised) throw std::logic_error("cycle component is not a raised primitive polynomial");
        if (ent.ell > 0 && !top.lower().is_zero()) throw std::logic_error("top component is not primitive");
        ent.p_top = std::move(top);
        ent.p_raised = std::move(raised);
    }
    tab.entries = std::move(ents);
    return tab;
}

CycleClassFn corrected_fn(const RingPtr& r, int g) {
    auto tab = decompose_cycle_function(r, g);
    auto out = cycle_class_fn(r, g);
    DecompositionTable lower{r, g, {}};
    for (auto& e : tab.entries)
        if (e.ell < g) lower.entries.push_back(e);
    out -= lower.reassemble();
    return out;
}

CohClass corrected_class(const RingPtr& r, const FTuple& t) {
    return corrected_fn(r, static_cast<int>(t.size())).evaluate(t);
}

CohClass corrected_class_codim1(const RingPtr& r, const std::vector<FieldElem>& lambda) {
    FieldElem h = herm_diag(r, lambda, lambda);
    return f_quad(r, to_coef(lambda)) - class_D(r) * Coef(h * FieldElem(Rat(1, r->n())));
}

AdjointReport delta_adjoint_check(const RingPtr& r, int g, int samples, std::uint32_t seed) {
    int n = r->n();
    if (g < 0 || g >= n) throw std::invalid_argument("need 0 <= g < n");
    AdjointReport rep;
    std::mt19937 rng(seed);
    auto fail = [&](const std::string& s) {
        rep.pass = false;
        rep.mismatches.push_back(s);
    };
    for (int s = 0; s < samples; ++s) {
        auto t = random_tuple(r->field(), g + 1, n, rng);
        if (s == 0 && g >= 1) t[1] = t[0];  // one degenerate tuple
        CohClass lhs = apply_F(cycle_class(r, t));
        CohClass rhs(r);
        for (int k = 0; k <= g; ++k)
            for (int l = 0; l <= g; ++l) {
                FieldElem h = herm_diag(r, t[k], t[l]);
                if (h.is_zero()) continue;
                CohClass prod = one_class(r);
                int pk = 0, pl = 0;
                for (int p = 0; p < g; ++p) {
                    if (pk == k) ++pk;
                    if (pl == l) ++pl;
                    prod = wedge(prod, f_sesq(r, to_coef(t[pk]), to_coef(t[pl])));
                    ++pk;
                    ++pl;
                }
                Coef c(h);
                rhs += prod * ((k + l) % 2 ? -c : c);
            }
        ++rep.checked;
        if (lhs != rhs) fail("adjoint@sample:" + std::to_string(s));
    }
    // intertwining on the monomial basis
    auto Zg = cycle_class_fn(r, g), Zg1 = cycle_class_fn(r, g + 1);
    for (auto& k : r->bidegree_basis(n - g - 1, n - g - 1)) {
        auto a = mono(r, k);
        ++rep.checked;
        if (Zg1.pair(a).lower() != Zg.pair(apply_E(a))) fail("lower@" + std::to_string(k.first) + "," + std::to_string(k.second));
    }
    for (auto& k : r->bidegree_basis(n - g, n - g)) {
        auto a = mono(r, k);
        ++rep.checked;
        if (Zg.pair(a).raise() != Zg1.pair(apply_F(a))) fail("raise@" + std::to_string(k.first) + "," + std::to_string(k.second));
    }
    return rep;
}

}  // namespace hqm
