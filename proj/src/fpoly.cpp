#include "hqm/fpoly.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace hqm {

std::vector<Subset> combinations(int n, int k) {
    std::vector<Subset> out;
    if (k < 0 || k > n) return out;
    Subset s(k);
    for (int i = 0; i < k; ++i) s[i] = i;
    for (;;) {
        out.push_back(s);
        int i = k - 1;
        while (i >= 0 && s[i] == n - k + i) --i;
        if (i < 0) break;
        ++s[i];
        for (int j = i + 1; j < k; ++j) s[j] = s[j - 1] + 1;
    }
    return out;
}

std::size_t binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    std::size_t r = 1;
    for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

Rat factorial(long n) {
    if (n < 0) throw std::domain_error("factorial of a negative number");
    Int r = 1;
    for (long i = 2; i <= n; ++i) r *= i;
    return Rat(r);
}

namespace {

// (-1)^{#{i in s : i < a}}
int eps(int a, const Subset& s) {
    int c = 0;
    for (int i : s)
        if (i < a) ++c;
    return c % 2 ? -1 : 1;
}

Subset insert(const Subset& s, int a) {
    Subset r = s;
    r.insert(std::lower_bound(r.begin(), r.end(), a), a);
    return r;
}

Subset erase_at(const Subset& s, std::size_t pos) {
    Subset r = s;
    r.erase(r.begin() + static_cast<long>(pos));
    return r;
}

template <class T>
std::vector<T> minors_of(const std::vector<std::vector<T>>& tuple, const std::vector<Subset>& subs, int g) {
    std::vector<T> out;
    out.reserve(subs.size());
    for (auto& s : subs) {
        Matrix<T> m(g, g);
        for (int r = 0; r < g; ++r)
            for (int c = 0; c < g; ++c) m(r, c) = tuple[c][s[r]];
        out.push_back(g == 0 ? T(1) : linalg::determinant(m));
    }
    return out;
}

}  // namespace

FFamily::FFamily(const QuadField& k, const Matrix<FieldElem>& gram) : k_(k), n_(static_cast<int>(gram.rows())), gram_(gram) {
    if (gram.rows() != gram.cols() || n_ == 0) throw std::invalid_argument("gram must be a nonempty square matrix");
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            if (gram(i, j) != gram(j, i).conj()) throw std::invalid_argument("gram must be Hermitian");
    auto inv = linalg::try_inverse(gram);
    if (!inv) throw std::invalid_argument("gram must be nondegenerate");
    Matrix<FieldElem> M = inv->transpose();  // (G^T)^{-1}

    for (int g = 0; g <= n_; ++g) subsets_.push_back(combinations(n_, g));
    raise_.resize(n_ + 1);
    lower_.resize(n_ + 1);
    for (int g = 0; g <= n_; ++g) {
        const auto& sg = subsets_[g];
        if (g < n_) {
            Matrix<Coef> r(dim(g + 1), dim(g));
            for (std::size_t i = 0; i < sg.size(); ++i)
                for (std::size_t j = 0; j < sg.size(); ++j) {
                    std::size_t col = index(g, i, j);
                    for (int a = 0; a < n_; ++a) {
                        if (std::binary_search(sg[i].begin(), sg[i].end(), a)) continue;
                        for (int b = 0; b < n_; ++b) {
                            if (std::binary_search(sg[j].begin(), sg[j].end(), b) || gram_(a, b).is_zero()) continue;
                            std::size_t row = index(g + 1, subset_index(g + 1, insert(sg[i], a)),
                                                    subset_index(g + 1, insert(sg[j], b)));
                            r(row, col) += Coef(gram_(a, b) * FieldElem(eps(a, sg[i]) * eps(b, sg[j])));
                        }
                    }
                }
            raise_[g] = std::move(r);
        }
        if (g > 0) {
            Matrix<Coef> l(dim(g - 1), dim(g));
            for (std::size_t i = 0; i < sg.size(); ++i)
                for (std::size_t j = 0; j < sg.size(); ++j) {
                    std::size_t col = index(g, i, j);
                    for (std::size_t ps = 0; ps < sg[i].size(); ++ps)
                        for (std::size_t pt = 0; pt < sg[j].size(); ++pt) {
                            const FieldElem& m = M(sg[i][ps], sg[j][pt]);
                            if (m.is_zero()) continue;
                            std::size_t row = index(g - 1, subset_index(g - 1, erase_at(sg[i], ps)),
                                                    subset_index(g - 1, erase_at(sg[j], pt)));
                            l(row, col) += Coef((ps + pt) % 2 ? -m : m);
                        }
                }
            lower_[g] = std::move(l);
        }
    }
    // boundary operators as empty-shaped matrices
    lower_[0] = Matrix<Coef>(0, 1);
    raise_[n_] = Matrix<Coef>(0, 1);
}

std::shared_ptr<const FFamily> FFamily::make(const QuadField& k, const Matrix<FieldElem>& gram) {
    return std::shared_ptr<const FFamily>(new FFamily(k, gram));
}

std::shared_ptr<const FFamily> FFamily::identity(const QuadField& k, int n) {
    return make(k, Matrix<FieldElem>::identity(n));
}

std::size_t FFamily::dim(int g) const {
    if (g < 0 || g > n_) throw std::out_of_range("g out of range");
    std::size_t c = subsets_[g].size();
    return c * c;
}

std::size_t FFamily::subset_index(int g, const Subset& s) const {
    const auto& v = subsets_.at(g);
    auto it = std::lower_bound(v.begin(), v.end(), s);
    if (it == v.end() || *it != s) throw std::invalid_argument("not a valid index set");
    return static_cast<std::size_t>(it - v.begin());
}

std::pair<std::size_t, std::size_t> FFamily::pair_of(int g, std::size_t b) const {
    std::size_t c = subsets_.at(g).size();
    return {b / c, b % c};
}

FPoly::FPoly(FamilyPtr fam, int g) : fam_(std::move(fam)), g_(g) {
    if (g < 0 || g > fam_->n()) throw std::invalid_argument("g out of range");
    c_.assign(fam_->dim(g), Coef(0));
}

FPoly::FPoly(FamilyPtr fam, int g, std::vector<Coef> c) : fam_(std::move(fam)), g_(g), c_(std::move(c)) {
    if (g < 0 || g > fam_->n()) throw std::invalid_argument("g out of range");
    if (c_.size() != fam_->dim(g)) throw std::invalid_argument("coefficient vector has wrong length");
}

FPoly FPoly::basis(FamilyPtr fam, int g, const Subset& i, const Subset& j) {
    FPoly p(fam, g);
    p.set(i, j, Coef(1));
    return p;
}

const Coef& FPoly::coeff(const Subset& i, const Subset& j) const {
    return c_[fam_->index(g_, fam_->subset_index(g_, i), fam_->subset_index(g_, j))];
}

void FPoly::set(const Subset& i, const Subset& j, Coef v) {
    c_[fam_->index(g_, fam_->subset_index(g_, i), fam_->subset_index(g_, j))] = std::move(v);
}

bool FPoly::is_zero() const {
    for (auto& x : c_)
        if (!x.is_zero()) return false;
    return true;
}

FPoly FPoly::lower() const {
    if (g_ == 0) return *this * Coef(0);
    return FPoly(fam_, g_ - 1, fam_->lower_matrix(g_).apply(c_));
}

FPoly FPoly::raise() const {
    if (g_ == fam_->n()) throw std::out_of_range("cannot raise beyond g = n");
    return FPoly(fam_, g_ + 1, fam_->raise_matrix(g_).apply(c_));
}

FPoly FPoly::lower(int times) const {
    FPoly p = *this;
    for (int i = 0; i < times; ++i) p = p.lower();
    return p;
}

FPoly FPoly::raise(int times) const {
    FPoly p = *this;
    for (int i = 0; i < times; ++i) p = p.raise();
    return p;
}

Coef FPoly::evaluate(const std::vector<std::vector<FieldElem>>& tuple) const {
    std::vector<std::vector<Coef>> t(tuple.size());
    for (std::size_t i = 0; i < tuple.size(); ++i) t[i].assign(tuple[i].begin(), tuple[i].end());
    return evaluate(t);
}

Coef FPoly::evaluate(const std::vector<std::vector<Coef>>& tuple) const {
    if (tuple.size() != static_cast<std::size_t>(g_)) throw std::invalid_argument("tuple length must equal g");
    for (auto& v : tuple)
        if (v.size() != static_cast<std::size_t>(n())) throw std::invalid_argument("vector length must equal n");
    const auto& subs = fam_->subsets(g_);
    auto mi = minors_of(tuple, subs, g_);
    std::vector<Coef> mc(mi.size());
    for (std::size_t i = 0; i < mi.size(); ++i) mc[i] = mi[i].conj();
    Coef s(0);
    for (std::size_t i = 0; i < subs.size(); ++i) {
        if (mi[i].is_zero()) continue;
        for (std::size_t j = 0; j < subs.size(); ++j) {
            const Coef& c = c_[fam_->index(g_, i, j)];
            if (!c.is_zero() && !mc[j].is_zero()) s += c * mi[i] * mc[j];
        }
    }
    return s;
}

Cplx FPoly::evaluate(const std::vector<std::vector<Cplx>>& tuple, unsigned bits) const {
    if (tuple.size() != static_cast<std::size_t>(g_)) throw std::invalid_argument("tuple length must equal g");
    PrecisionGuard pg(bits);
    const auto& subs = fam_->subsets(g_);
    std::vector<Cplx> mi;
    for (auto& s : subs) {
        CMatrix m(g_, g_);
        for (int r = 0; r < g_; ++r)
            for (int c = 0; c < g_; ++c) m(r, c) = tuple[c].at(s[r]);
        mi.push_back(g_ == 0 ? Cplx(1) : det(m));
    }
    Cplx s;
    for (std::size_t i = 0; i < subs.size(); ++i)
        for (std::size_t j = 0; j < subs.size(); ++j) {
            const Coef& c = c_[fam_->index(g_, i, j)];
            if (!c.is_zero()) s += embed(c, fam_->field(), bits) * mi[i] * mi[j].conj();
        }
    return s;
}

void FPoly::check_same(const FPoly& o) const {
    if (fam_ != o.fam_ && (fam_->gram() != o.fam_->gram() || fam_->field().d != o.fam_->field().d))
        throw std::invalid_argument("polynomials live in different families");
    if (g_ != o.g_) throw std::invalid_argument("polynomials have different genus");
}

FPoly& FPoly::operator+=(const FPoly& o) {
    check_same(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

FPoly& FPoly::operator-=(const FPoly& o) {
    check_same(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

FPoly& FPoly::operator*=(const Coef& s) {
    for (auto& x : c_) x *= s;
    return *this;
}

std::string FPoly::str() const {
    std::ostringstream os;
    bool first = true;
    const auto& subs = fam_->subsets(g_);
    for (std::size_t b = 0; b < c_.size(); ++b) {
        if (c_[b].is_zero()) continue;
        auto [i, j] = fam_->pair_of(g_, b);
        if (!first) os << " + ";
        first = false;
        os << "(" << c_[b] << ")[";
        for (int x : subs[i]) os << x + 1;
        os << "|";
        for (int x : subs[j]) os << x + 1;
        os << "]";
    }
    if (first) os << "0";
    return os.str();
}

Matrix<Coef> Sl2Module::e_power(std::size_t p, int j) const {
    Matrix<Coef> r = Matrix<Coef>::identity(dims[p]);
    for (int s = 0; s < j; ++s) {
        if (p + s + 1 >= pieces()) return Matrix<Coef>(0, dims[p]);
        r = E[p + s] * r;
    }
    return r;
}

Matrix<Coef> Sl2Module::f_power(std::size_t p, int j) const {
    Matrix<Coef> r = Matrix<Coef>::identity(dims[p]);
    for (int s = 0; s < j; ++s) {
        if (static_cast<long>(p) - s - 1 < 0) return Matrix<Coef>(0, dims[p]);
        r = F[p - s] * r;
    }
    return r;
}

Sl2Module fspace_module(const FamilyPtr& fam) {
    Sl2Module m;
    int n = fam->n();
    for (int g = 0; g <= n; ++g) {
        m.weight.push_back(fam->weight(g));
        m.dims.push_back(fam->dim(g));
        m.E.push_back(g < n ? fam->raise_matrix(g) : Matrix<Coef>(0, fam->dim(g)));
        m.F.push_back(g > 0 ? fam->lower_matrix(g) : Matrix<Coef>(0, fam->dim(g)));
    }
    return m;
}

Sl2Report check_sl2(const Sl2Module& mod) {
    Sl2Report rep;
    std::size_t P = mod.pieces();
    auto fail = [&](const std::string& rel, std::size_t p, const Matrix<Coef>& diff) {
        for (std::size_t c = 0; c < diff.cols(); ++c)
            for (std::size_t r = 0; r < diff.rows(); ++r)
                if (!diff(r, c).is_zero()) {
                    rep.pass = false;
                    rep.failures.push_back(rel + "@" + std::to_string(p) + ":" + std::to_string(c));
                    break;
                }
    };
    for (std::size_t p = 0; p < P; ++p) {
        std::size_t d = mod.dims[p];
        // [E, F] = H on piece p
        Matrix<Coef> ef(d, d), fe(d, d);
        if (p > 0) ef = mod.E[p - 1] * mod.F[p];
        if (p + 1 < P) fe = mod.F[p + 1] * mod.E[p];
        Matrix<Coef> h = Matrix<Coef>::identity(d).scaled(Coef(mod.weight[p]));
        fail("[E,F]=H", p, ef - fe - h);
        // [H, E] = 2E and [H, F] = -2F reduce to weight spacing
        if (p + 1 < P) {
            Matrix<Coef> he = mod.E[p].scaled(Coef(mod.weight[p + 1] - mod.weight[p] - 2));
            fail("[H,E]=2E", p, he);
        }
        if (p > 0) {
            Matrix<Coef> hf = mod.F[p].scaled(Coef(mod.weight[p - 1] - mod.weight[p] + 2));
            fail("[H,F]=-2F", p, hf);
        }
    }
    return rep;
}

Sl2Report sl2_check(const QuadField& k, const Matrix<FieldElem>& gram) {
    return check_sl2(fspace_module(FFamily::make(k, gram)));
}

Rat projector_coefficient(int m, int i, int j) {
    if (j < i) return Rat(0);
    Rat c = factorial(m + i) * (m + 2 * i + 1) / (factorial(i) * factorial(j - i) * factorial(m + i + j + 1));
    return (i + j) % 2 ? Rat(-c) : c;
}

Matrix<Coef> isotypic_projector(const Sl2Module& mod, std::size_t piece, int k) {
    if (piece >= mod.pieces()) throw std::out_of_range("piece out of range");
    int m = -mod.weight[piece];
    if (m < 0) throw std::invalid_argument("projectors act on nonpositive weight spaces");
    if (k < m || (k - m) % 2 != 0) throw std::invalid_argument("k must satisfy k >= m and k = m mod 2");
    int i = (k - m) / 2;
    std::size_t d = mod.dims[piece];
    Matrix<Coef> pi(d, d);
    for (int j = i; j <= static_cast<int>(piece); ++j) {
        Matrix<Coef> fj = mod.f_power(piece, j);
        if (fj.rows() == 0) break;
        std::size_t down = piece - static_cast<std::size_t>(j);
        Matrix<Coef> term = mod.e_power(down, j) * fj;
        pi = pi + term.scaled(Coef(projector_coefficient(m, i, j)));
    }
    return pi;
}

namespace {

Rat lowest_weight_scalar(int m, int i) {
    // F^i E^i q = prod_{r=1}^{i} r (m - r + 1) q for q primitive of weight -m
    Rat c = 1;
    for (int r = 1; r <= i; ++r) c *= Rat(r * (m - r + 1));
    return c;
}

std::vector<LefschetzPart> decompose_low(const FPoly& p) {
    int n = p.n(), g = p.genus();
    int m = n - 2 * g;
    std::vector<LefschetzPart> out;
    Sl2Module mod = fspace_module(p.family());
    for (int i = g; i >= 0; --i) {
        Matrix<Coef> pi = isotypic_projector(mod, static_cast<std::size_t>(g), m + 2 * i);
        FPoly comp(p.family(), g, pi.apply(p.coeffs()));
        if (comp.is_zero()) continue;
        Rat c = lowest_weight_scalar(m + 2 * i, i);
        FPoly q = comp.lower(i) * Coef(Rat(1) / c);
        if (q.raise(i) != comp) throw std::logic_error("Lefschetz component does not reassemble");
        out.push_back({g - i, std::move(q)});
    }
    return out;
}

}  // namespace

std::vector<LefschetzPart> lefschetz_decompose(const FPoly& p) {
    int n = p.n(), g = p.genus();
    if (2 * g <= n) return decompose_low(p);
    // hard Lefschetz: P = Lambda^s P' with P' in F_{n, n-g}
    int s = 2 * g - n, g0 = n - g;
    const auto& fam = p.family();
    Matrix<Coef> ls = Matrix<Coef>::identity(fam->dim(g0));
    for (int t = 0; t < s; ++t) ls = fam->raise_matrix(g0 + t) * ls;
    Matrix<Coef> rhs(p.coeffs().size(), 1);
    for (std::size_t i = 0; i < p.coeffs().size(); ++i) rhs(i, 0) = p.coeffs()[i];
    auto sol = linalg::solve(ls, rhs);
    if (!sol) throw std::logic_error("hard Lefschetz preimage not found");
    FPoly pre(fam, g0, sol->col(0));
    return decompose_low(pre);
}

FPoly lefschetz_reassemble(const std::vector<LefschetzPart>& parts, int g) {
    if (parts.empty()) throw std::invalid_argument("empty decomposition");
    FPoly s(parts[0].q.family(), g);
    for (auto& pt : parts) s += pt.q.raise(g - pt.ell);
    return s;
}

std::vector<LaplacianTerm> exp_laplacian(const FPoly& p, const Rat& t) {
    std::vector<LaplacianTerm> out;
    FPoly cur = p;
    Rat scale = 1;
    for (int r = 0; r <= p.genus(); ++r) {
        if (r > 0) {
            cur = cur.lower();
            scale *= t / r;
        }
        if (cur.is_zero()) break;
        out.push_back({r, cur * Coef(scale)});
    }
    return out;
}

std::vector<FPoly> primitive_basis(const FamilyPtr& fam, int g) {
    std::vector<FPoly> out;
    if (g == 0) {
        out.push_back(FPoly::one(fam));
        return out;
    }
    Matrix<Coef> k = linalg::kernel(fam->lower_matrix(g));
    for (std::size_t c = 0; c < k.cols(); ++c) out.emplace_back(fam, g, k.col(c));
    return out;
}

}  // namespace hqm
