#include "hqm/torcoh.hpp"

#include <bit>
#include <stdexcept>

namespace hqm {

int popcount(Mask m) { return std::popcount(m); }

Subset mask_to_subset(Mask m) {
    Subset s;
    for (int i = 0; m; ++i, m >>= 1)
        if (m & 1) s.push_back(i);
    return s;
}

Mask subset_to_mask(const Subset& s) {
    Mask m = 0;
    for (int i : s) m |= Mask(1) << i;
    return m;
}

namespace {

// number of pairs (x in a, y in b) with x > y
int crossings(Mask a, Mask b) {
    int c = 0;
    for (Mask bb = b; bb; bb &= bb - 1) {
        int y = std::countr_zero(bb);
        c += std::popcount(a & ~((Mask(2) << y) - 1));
    }
    return c;
}

std::vector<Coef> vec_of(const Matrix<Coef>& m, std::size_t c) { return m.col(c); }

}  // namespace

CohRing::CohRing(const QuadField& k, std::vector<long> a) : k_(k), a_(std::move(a)) {
    if (a_.empty()) throw std::invalid_argument("rank must be positive");
    if (a_.size() > 12) throw std::invalid_argument("rank too large for the exterior model");
    for (long x : a_)
        if (x <= 0) throw std::invalid_argument("diagonal entries must be positive");
    c_ = -k_.delta().inverse();
    Matrix<FieldElem> g(a_.size(), a_.size());
    for (std::size_t i = 0; i < a_.size(); ++i) g(i, i) = FieldElem(a_[i]);
    fam_ = FFamily::make(k_, g);
}

std::shared_ptr<const CohRing> CohRing::make(const QuadField& k, std::vector<long> a) {
    return std::shared_ptr<const CohRing>(new CohRing(k, std::move(a)));
}

std::vector<MonoKey> CohRing::bidegree_basis(int p, int q) const {
    std::vector<MonoKey> out;
    for (auto& i : combinations(n(), p))
        for (auto& j : combinations(n(), q)) out.emplace_back(subset_to_mask(i), subset_to_mask(j));
    return out;
}

std::vector<MonoKey> CohRing::degree_basis(int t) const {
    std::vector<MonoKey> out;
    for (int p = 0; p <= t; ++p) {
        int q = t - p;
        if (p > n() || q > n()) continue;
        auto b = bidegree_basis(p, q);
        out.insert(out.end(), b.begin(), b.end());
    }
    return out;
}

const LefschetzModule& CohRing::lefschetz(int parity) const {
    if (parity != 0 && parity != 1) throw std::invalid_argument("parity must be 0 or 1");
    std::call_once(once_[parity], [&] {
        auto self = shared_from_this();
        LefschetzModule lm;
        int n = this->n();
        for (int t = parity; t <= 2 * n; t += 2) {
            lm.degree.push_back(t);
            lm.basis.push_back(degree_basis(t));
            lm.mod.weight.push_back(t - n);
            lm.mod.dims.push_back(lm.basis.back().size());
        }
        std::size_t P = lm.degree.size();
        CohClass D = class_D(self);
        for (std::size_t p = 0; p < P; ++p) {
            if (p + 1 == P) {
                lm.mod.E.emplace_back(0, lm.mod.dims[p]);
                continue;
            }
            Matrix<Coef> e(lm.mod.dims[p + 1], lm.mod.dims[p]);
            for (std::size_t c = 0; c < lm.basis[p].size(); ++c) {
                CohClass m(self);
                m.add_term(lm.basis[p][c].first, lm.basis[p][c].second, Coef(1));
                e.set_col(c, wedge(D, m).to_vector(lm.basis[p + 1]));
            }
            lm.mod.E.push_back(std::move(e));
        }
        // primitive subspaces below the middle
        std::vector<Matrix<Coef>> prim(P);
        for (std::size_t p = 0; p < P; ++p) {
            int t = lm.degree[p];
            if (t > n) break;
            Matrix<Coef> ep = lm.mod.e_power(p, n - t + 1);
            prim[p] = ep.rows() == 0 ? Matrix<Coef>::identity(lm.mod.dims[p]) : linalg::kernel(ep);
        }
        // F on the adapted basis E^r(primitive)
        lm.mod.F.emplace_back(0, lm.mod.dims[0]);
        for (std::size_t p = 1; p < P; ++p) {
            int t = lm.degree[p];
            std::size_t d = lm.mod.dims[p];
            Matrix<Coef> B(d, d), T(lm.mod.dims[p - 1], d);
            std::size_t col = 0;
            for (std::size_t p0 = 0; p0 <= p; ++p0) {
                int t0 = lm.degree[p0];
                if (t0 > n || t0 > 2 * n - t) break;
                int r = static_cast<int>(p - p0);
                int m = n - t0;
                Matrix<Coef> er = lm.mod.e_power(p0, r);
                Matrix<Coef> er1 = lm.mod.e_power(p0, r - 1);
                for (std::size_t v = 0; v < prim[p0].cols(); ++v) {
                    if (col >= d) throw std::logic_error("adapted basis too large");
                    auto pv = vec_of(prim[p0], v);
                    B.set_col(col, er.apply(pv));
                    if (r > 0) {
                        auto img = er1.apply(pv);
                        Coef s(Rat(r * (m - r + 1)));
                        for (auto& x : img) x *= s;
                        T.set_col(col, img);
                    }
                    ++col;
                }
            }
            if (col != d) throw std::logic_error("adapted basis has wrong size");
            auto binv = linalg::try_inverse(B);
            if (!binv) throw std::logic_error("adapted Lefschetz basis is singular");
            lm.mod.F.push_back(T * *binv);
        }
        lm_[parity] = std::move(lm);
    });
    return lm_[parity];
}

Coef CohClass::coeff(Mask i, Mask j) const {
    auto it = terms_.find({i, j});
    return it == terms_.end() ? Coef(0) : it->second;
}

void CohClass::add_term(Mask i, Mask j, const Coef& c) {
    if (c.is_zero()) return;
    auto it = terms_.find({i, j});
    if (it == terms_.end()) {
        terms_.emplace(MonoKey{i, j}, c);
        return;
    }
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
}

std::optional<std::pair<int, int>> CohClass::bidegree() const {
    if (terms_.empty()) return std::nullopt;
    int p = popcount(terms_.begin()->first.first), q = popcount(terms_.begin()->first.second);
    for (auto& [k, c] : terms_)
        if (popcount(k.first) != p || popcount(k.second) != q) return std::nullopt;
    return std::make_pair(p, q);
}

CohClass CohClass::involution() const {
    CohClass r(ring_);
    for (auto& [k, c] : terms_) {
        int s = popcount(k.first) * popcount(k.second);
        r.add_term(k.second, k.first, s % 2 ? -c.conj() : c.conj());
    }
    return r;
}

Coef CohClass::integrate() const {
    int n = ring_->n();
    Mask full = (Mask(1) << n) - 1;
    Coef top = coeff(full, full);
    if (top.is_zero()) return top;
    // prod_l dz_l dzbar_l = (-1)^{n(n-1)/2} dz_1..dz_n dzbar_1..dzbar_n
    FieldElem vol(1);
    for (int i = 0; i < n; ++i) vol *= ring_->c();
    if ((n * (n - 1) / 2) % 2) vol = -vol;
    return top / Coef(vol);
}

std::vector<Coef> CohClass::to_vector(const std::vector<MonoKey>& basis) const {
    std::vector<Coef> v(basis.size(), Coef(0));
    std::size_t found = 0;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        auto it = terms_.find(basis[i]);
        if (it != terms_.end()) {
            v[i] = it->second;
            ++found;
        }
    }
    if (found != terms_.size()) throw std::invalid_argument("class has terms outside the given basis");
    return v;
}

CohClass CohClass::from_vector(RingPtr r, const std::vector<MonoKey>& basis, const std::vector<Coef>& v) {
    CohClass x(std::move(r));
    for (std::size_t i = 0; i < basis.size(); ++i) x.add_term(basis[i].first, basis[i].second, v[i]);
    return x;
}

CohClass& CohClass::operator+=(const CohClass& o) {
    if (!ring_) ring_ = o.ring_;
    for (auto& [k, c] : o.terms_) add_term(k.first, k.second, c);
    return *this;
}

CohClass& CohClass::operator-=(const CohClass& o) {
    if (!ring_) ring_ = o.ring_;
    for (auto& [k, c] : o.terms_) add_term(k.first, k.second, -c);
    return *this;
}

CohClass& CohClass::operator*=(const Coef& s) {
    if (s.is_zero()) {
        terms_.clear();
        return *this;
    }
    for (auto& [k, c] : terms_) c *= s;
    return *this;
}

CohClass wedge(const CohClass& x, const CohClass& y) {
    if (x.ring() && y.ring() && x.ring() != y.ring() &&
        (x.ring()->a() != y.ring()->a() || x.ring()->field().d != y.ring()->field().d))
        throw std::invalid_argument("classes live in different rings");
    CohClass r(x.ring() ? x.ring() : y.ring());
    for (auto& [kx, cx] : x.terms())
        for (auto& [ky, cy] : y.terms()) {
            Mask I = kx.first, J = kx.second, K = ky.first, L = ky.second;
            if ((I & K) || (J & L)) continue;
            int s = popcount(J) * popcount(K) + crossings(I, K) + crossings(J, L);
            Coef c = cx * cy;
            r.add_term(I | K, J | L, s % 2 ? -c : c);
        }
    return r;
}

CohClass wedge_all(const RingPtr& r, const std::vector<CohClass>& xs) {
    CohClass acc = one_class(r);
    for (auto& x : xs) acc = wedge(acc, x);
    return acc;
}

CohClass power(const CohClass& x, int e) {
    CohClass acc = one_class(x.ring());
    for (int i = 0; i < e; ++i) acc = wedge(acc, x);
    return acc;
}

CohClass one_class(const RingPtr& r) {
    CohClass x(r);
    x.add_term(0, 0, Coef(1));
    return x;
}

CohClass volume_class(const RingPtr& r) {
    CohClass v = one_class(r);
    for (int l = 0; l < r->n(); ++l) {
        CohClass f(r);
        f.add_term(Mask(1) << l, Mask(1) << l, Coef(r->c()));
        v = wedge(v, f);
    }
    return v;
}

CohClass f_sesq(const RingPtr& r, const std::vector<Coef>& lambda, const std::vector<Coef>& mu) {
    int n = r->n();
    if (lambda.size() != static_cast<std::size_t>(n) || mu.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("vector length must equal n");
    CohClass x(r);
    for (int l = 0; l < n; ++l) {
        if (lambda[l].is_zero()) continue;
        for (int j = 0; j < n; ++j) {
            if (mu[j].is_zero()) continue;
            Coef c = Coef(r->c() * FieldElem(r->a()[l] * r->a()[j])) * lambda[l] * mu[j].conj();
            x.add_term(Mask(1) << l, Mask(1) << j, c);
        }
    }
    return x;
}

CohClass f_quad(const RingPtr& r, const std::vector<Coef>& lambda) { return f_sesq(r, lambda, lambda); }

namespace {

std::vector<Coef> unit_vec(int n, int l, const Coef& v = Coef(1)) {
    std::vector<Coef> e(n, Coef(0));
    e[l] = v;
    return e;
}

}  // namespace

CohClass class_Y(const RingPtr& r, int l) { return f_quad(r, unit_vec(r->n(), l)); }

CohClass class_Yplus(const RingPtr& r, int l, int j) {
    auto v = unit_vec(r->n(), l);
    v[j] = Coef(-1);
    return f_quad(r, v) - class_Y(r, l) - class_Y(r, j);
}

CohClass class_Yminus(const RingPtr& r, int l, int j) {
    auto v = unit_vec(r->n(), l);
    v[j] = Coef(-r->field().delta());
    return f_quad(r, v) - class_Y(r, l) - class_Y(r, j) * Coef(r->field().disc);
}

CohClass class_D(const RingPtr& r) {
    CohClass x(r);
    for (int l = 0; l < r->n(); ++l) x.add_term(Mask(1) << l, Mask(1) << l, Coef(r->c() * FieldElem(r->a()[l])));
    return x;
}

YDecomposition y_decomposition(const RingPtr& r, const std::vector<FieldElem>& lambda) {
    int n = r->n();
    if (lambda.size() != static_cast<std::size_t>(n)) throw std::invalid_argument("vector length must equal n");
    YDecomposition yd;
    FieldElem delta = r->field().delta();
    for (int l = 0; l < n; ++l) yd.y.push_back(FieldElem(lambda[l].norm()));
    for (int l = 0; l < n; ++l)
        for (int j = l + 1; j < n; ++j) {
            FieldElem z = lambda[l] * lambda[j].conj();
            FieldElem re = (z + z.conj()) / FieldElem(2);
            FieldElem im_over_sqrt = (z - z.conj()) / (FieldElem(2) * delta);
            yd.plus[{l, j}] = -re;
            yd.minus[{l, j}] = im_over_sqrt;
        }
    return yd;
}

CohClass from_y_decomposition(const RingPtr& r, const YDecomposition& yd) {
    CohClass x(r);
    for (int l = 0; l < r->n(); ++l) x += class_Y(r, l) * Coef(yd.y[l]);
    for (auto& [k, v] : yd.plus) x += class_Yplus(r, k.first, k.second) * Coef(v);
    for (auto& [k, v] : yd.minus) x += class_Yminus(r, k.first, k.second) * Coef(v);
    return x;
}

namespace {

template <class Op>
CohClass apply_lefschetz(const CohClass& x, Op op) {
    const RingPtr& r = x.ring();
    CohClass out(r);
    std::map<int, CohClass> by_deg;
    for (auto& [k, c] : x.terms()) {
        int t = popcount(k.first) + popcount(k.second);
        auto it = by_deg.try_emplace(t, CohClass(r)).first;
        it->second.add_term(k.first, k.second, c);
    }
    for (auto& [t, part] : by_deg) {
        const auto& lm = r->lefschetz(t % 2);
        std::size_t p = static_cast<std::size_t>(t / 2);
        out += op(lm, p, part);
    }
    return out;
}

}  // namespace

CohClass apply_E(const CohClass& x) { return wedge(class_D(x.ring()), x); }

CohClass apply_F(const CohClass& x) {
    return apply_lefschetz(x, [](const LefschetzModule& lm, std::size_t p, const CohClass& part) {
        if (p == 0) return CohClass(part.ring());
        auto v = lm.mod.F[p].apply(part.to_vector(lm.basis[p]));
        return CohClass::from_vector(part.ring(), lm.basis[p - 1], v);
    });
}

std::vector<CohClass> rational_hodge_basis(const RingPtr& r, int l) {
    int n = r->n();
    if (l < 0 || l > n) throw std::invalid_argument("l out of range");
    if (l == 0) return {one_class(r)};
    std::vector<CohClass> gens;
    for (int i = 0; i < n; ++i) gens.push_back(class_Y(r, i));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            gens.push_back(class_Yplus(r, i, j));
            gens.push_back(class_Yminus(r, i, j));
        }
    auto basis = r->bidegree_basis(l, l);
    std::size_t target = basis.size();
    std::vector<CohClass> out;
    Matrix<Coef> acc(target, 0);
    std::vector<std::vector<Coef>> cols;
    // multisets of l generators in lexicographic order
    std::vector<std::size_t> idx(l, 0);
    for (;;) {
        CohClass prod = one_class(r);
        for (auto i : idx) prod = wedge(prod, gens[i]);
        if (!prod.is_zero()) {
            cols.push_back(prod.to_vector(basis));
            Matrix<Coef> m(target, cols.size());
            for (std::size_t c = 0; c < cols.size(); ++c) m.set_col(c, cols[c]);
            if (linalg::rank(m) == cols.size()) out.push_back(prod);
            else cols.pop_back();
            if (out.size() == target) break;
        }
        int p = l - 1;
        while (p >= 0 && idx[p] == gens.size() - 1) --p;
        if (p < 0) break;
        ++idx[p];
        for (int q = p + 1; q < l; ++q) idx[q] = idx[p];
    }
    if (out.size() != target) throw std::logic_error("products of divisor classes do not span H^{l,l}");
    return out;
}

std::vector<CohClass> primitive_hodge_basis(const RingPtr& r, int l) {
    int n = r->n();
    if (2 * l > n) return {};
    const auto& lm = r->lefschetz(0);
    auto pi = isotypic_projector(lm.mod, static_cast<std::size_t>(l), n - 2 * l);
    const auto& basis = lm.basis[l];
    std::vector<CohClass> out;
    std::vector<std::vector<Coef>> cols;
    for (auto& w : rational_hodge_basis(r, l)) {
        auto v = pi.apply(w.to_vector(basis));
        cols.push_back(v);
        Matrix<Coef> m(basis.size(), cols.size());
        for (std::size_t c = 0; c < cols.size(); ++c) m.set_col(c, cols[c]);
        if (linalg::rank(m) == cols.size()) out.push_back(CohClass::from_vector(r, basis, v));
        else cols.pop_back();
    }
    std::size_t expect = binomial(n, l) * binomial(n, l) - (l > 0 ? binomial(n, l - 1) * binomial(n, l - 1) : 0);
    if (out.size() != expect) throw std::logic_error("primitive Hodge basis has unexpected dimension");
    return out;
}

}  // namespace hqm
