#include "hqm/hlattice.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace hqm {

namespace {

Int i128_to_mpz(__int128 v) {
    bool neg = v < 0;
    unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
    Int hi(static_cast<unsigned long>(u >> 64));
    Int lo(static_cast<unsigned long>(u & ~0ULL));
    Int r = (hi << 64) + lo;
    return neg ? Int(-r) : r;
}

std::int64_t to_i64(const Int& x) {
    if (!x.fits_slong_p()) throw std::overflow_error("integer coordinate too large");
    return x.get_si();
}

// signature of a rational symmetric matrix by congruence diagonalization
std::pair<int, int> signature(Matrix<Rat> a) {
    std::size_t n = a.rows();
    int p = 0, q = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t piv = n;
        for (std::size_t k = i; k < n; ++k)
            if (sgn(a(k, k)) != 0) { piv = k; break; }
        if (piv == n) {
            // all remaining diagonal zero: use e_i + e_j with a_ij != 0
            std::size_t ii = n, jj = n;
            for (std::size_t k = i; k < n && ii == n; ++k)
                for (std::size_t l = k + 1; l < n; ++l)
                    if (sgn(a(k, l)) != 0) { ii = k; jj = l; break; }
            if (ii == n) break;  // remaining block is zero
            for (std::size_t c = 0; c < n; ++c) a(ii, c) += a(jj, c);
            for (std::size_t r = 0; r < n; ++r) a(r, ii) += a(r, jj);
            piv = ii;
        }
        if (piv != i) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a(i, c), a(piv, c));
            for (std::size_t r = 0; r < n; ++r) std::swap(a(r, i), a(r, piv));
        }
        Rat d = a(i, i);
        if (d > 0) ++p; else ++q;
        for (std::size_t r = i + 1; r < n; ++r) {
            if (sgn(a(r, i)) == 0) continue;
            Rat f = a(r, i) / d;
            for (std::size_t c = i; c < n; ++c) a(r, c) -= f * a(i, c);
        }
        for (std::size_t c = i + 1; c < n; ++c) a(i, c) = 0;
        for (std::size_t r = i + 1; r < n; ++r) a(r, i) = 0;
    }
    return {p, q};
}

}  // namespace

bool is_hermitian(const Matrix<FieldElem>& m) {
    if (m.rows() != m.cols()) return false;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i; j < m.cols(); ++j)
            if (m(i, j) != m(j, i).conj()) return false;
    return true;
}

bool is_psd(const Matrix<FieldElem>& m0) {
    Matrix<FieldElem> m = m0;
    std::size_t n = m.rows();
    std::vector<bool> done(n, false);
    for (std::size_t step = 0; step < n; ++step) {
        std::size_t piv = n;
        for (std::size_t k = 0; k < n; ++k)
            if (!done[k] && !m(k, k).is_zero()) { piv = k; break; }
        if (piv == n) {
            for (std::size_t k = 0; k < n; ++k)
                for (std::size_t l = 0; l < n; ++l)
                    if (!done[k] && !done[l] && !m(k, l).is_zero()) return false;
            return true;
        }
        if (m(piv, piv).a() < 0) return false;
        done[piv] = true;
        FieldElem inv = m(piv, piv).inverse();
        for (std::size_t r = 0; r < n; ++r) {
            if (done[r] || m(r, piv).is_zero()) continue;
            FieldElem f = m(r, piv) * inv;
            for (std::size_t c = 0; c < n; ++c)
                if (!done[c]) m(r, c) -= f * m(piv, c);
        }
    }
    return true;
}

bool in_inverse_different(const QuadField& k, const FieldElem& x) {
    return (k.delta() * x).is_integral();
}

HermLattice::HermLattice(QuadField k, Matrix<FieldElem> gram) : k_(k), n_(gram.rows()), gram_(std::move(gram)) {
    if (gram_.rows() != gram_.cols()) throw std::invalid_argument("gram must be square");
    for (auto& x : gram_.data())
        if (x.d() != 0 && x.d() != k_.d) throw std::invalid_argument("gram entry from a different field");
    if (!is_hermitian(gram_)) throw std::invalid_argument("gram is not Hermitian");
    std::size_t m = 2 * n_;
    s_ = IMatrix(m, m);
    Matrix<Rat> sq(m, m);
    FieldElem w = k_.omega();
    FieldElem pw[2] = {k_.one(), w};
    for (std::size_t s = 0; s < n_; ++s)
        for (std::size_t t = 0; t < n_; ++t)
            for (int al = 0; al < 2; ++al)
                for (int be = 0; be < 2; ++be) {
                    Rat tr = (pw[al] * gram_(s, t) * pw[be].conj()).trace();
                    if (tr.get_den() != 1) throw std::invalid_argument("trace form is not integral");
                    s_(2 * s + al, 2 * t + be) = tr.get_num();
                    sq(2 * s + al, 2 * t + be) = tr;
                }
    if (n_ == 0) {
        det_ = 1;
        sinv_ = Matrix<Rat>(0, 0);
        def_ = Definiteness::positive;
        return;
    }
    auto inv = linalg::try_inverse(sq);
    if (!inv) throw std::invalid_argument("degenerate lattice");
    sinv_ = *inv;
    det_ = abs(int_det(s_));
    auto [p2, q2] = signature(sq);
    p_ = p2 / 2;
    q_ = q2 / 2;
    if (q_ == 0) def_ = Definiteness::positive;
    else if (q_ == 1) def_ = Definiteness::lorentzian;
    else def_ = Definiteness::other;
}

HermLattice diagonal_lattice(const QuadField& k, const std::vector<long>& a) {
    Matrix<FieldElem> g(a.size(), a.size());
    for (std::size_t i = 0; i < a.size(); ++i) g(i, i) = k.elem(a[i], 0);
    return HermLattice(k, g);
}

FieldElem HermLattice::h(const Vec& x, const Vec& y) const {
    FieldElem r(k_.d, 0, 0);
    for (std::size_t s = 0; s < n_; ++s) {
        if (x[s].is_zero()) continue;
        for (std::size_t t = 0; t < n_; ++t) {
            if (y[t].is_zero() || gram_(s, t).is_zero()) continue;
            r += x[s] * gram_(s, t) * y[t].conj();
        }
    }
    return r;
}

Vec HermLattice::from_trace(const std::vector<Rat>& x) const {
    Vec v(n_);
    for (std::size_t s = 0; s < n_; ++s) v[s] = k_.elem(x[2 * s], x[2 * s + 1]);
    return v;
}

std::vector<Rat> HermLattice::to_trace(const Vec& v) const {
    std::vector<Rat> x(2 * n_);
    for (std::size_t s = 0; s < n_; ++s) {
        x[2 * s] = v[s].a();
        x[2 * s + 1] = v[s].b();
    }
    return x;
}

Vec HermLattice::from_dual(const std::vector<long>& z) const {
    std::size_t m = 2 * n_;
    std::vector<Rat> x(m, 0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            if (z[j] != 0) x[i] += sinv_(i, j) * z[j];
    return from_trace(x);
}

std::optional<std::vector<Int>> HermLattice::to_dual(const Vec& v) const {
    auto x = to_trace(v);
    std::size_t m = 2 * n_;
    std::vector<Int> z(m);
    for (std::size_t i = 0; i < m; ++i) {
        Rat acc = 0;
        for (std::size_t j = 0; j < m; ++j) acc += Rat(s_(i, j)) * x[j];
        if (acc.get_den() != 1) return std::nullopt;
        z[i] = acc.get_num();
    }
    return z;
}

bool HermLattice::in_lattice(const Vec& v) const {
    for (auto& c : v)
        if (!c.is_integral()) return false;
    return true;
}

bool HermLattice::in_dual(const Vec& v) const { return to_dual(v).has_value(); }

DualLattice dual_basis(const HermLattice& L) {
    // L^dual = delta^{-1} (G^{-1})^T O_k^n
    std::size_t n = L.rank();
    auto gi = linalg::inverse(L.gram());
    FieldElem di = L.field().delta().inverse();
    DualLattice D;
    D.basis = Matrix<FieldElem>(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) D.basis(i, j) = di * gi(j, i);
    return D;
}

DiscGroup::DiscGroup(const HermLattice& L) : L_(L) {
    std::size_t m = 2 * L.rank();
    if (m == 0) return;
    HnfResult r = hnf(L.trace_gram());
    hnf_ = r.h;
    box_.resize(m);
    order_ = 1;
    for (std::size_t i = 0; i < m; ++i) {
        box_[i] = to_i64(hnf_(i, i));
        order_ *= static_cast<std::size_t>(box_[i]);
    }
    for (auto& f : smith_invariants(L.trace_gram()))
        if (f != 1) inv_.push_back(f);
    if (Int(static_cast<unsigned long>(order_)) != L.trace_det())
        throw std::logic_error("discriminant order mismatch");
}

void DiscGroup::reduce(std::vector<Int>& z) const {
    std::size_t m = box_.size();
    for (std::size_t k = 0; k < m; ++k) {
        Int q;
        mpz_fdiv_q(q.get_mpz_t(), z[k].get_mpz_t(), hnf_(k, k).get_mpz_t());
        if (q == 0) continue;
        for (std::size_t j = k; j < m; ++j) z[j] -= q * hnf_(k, j);
    }
}

std::vector<long> DiscGroup::rep(std::size_t i) const {
    std::size_t m = box_.size();
    std::vector<long> z(m);
    for (std::size_t k = m; k-- > 0;) {
        z[k] = static_cast<long>(i % static_cast<std::size_t>(box_[k]));
        i /= static_cast<std::size_t>(box_[k]);
    }
    return z;
}

Vec DiscGroup::rep_vector(std::size_t i) const { return L_.from_dual(rep(i)); }

std::size_t DiscGroup::index_of_dual(const std::vector<long>& z0) const {
    std::vector<Int> z(z0.begin(), z0.end());
    reduce(z);
    std::size_t idx = 0;
    for (std::size_t k = 0; k < box_.size(); ++k) idx = idx * static_cast<std::size_t>(box_[k]) + z[k].get_ui();
    return idx;
}

std::size_t DiscGroup::index_of(const Vec& v) const {
    auto z = L_.to_dual(v);
    if (!z) throw std::invalid_argument("vector is not in the dual lattice");
    reduce(*z);
    std::size_t idx = 0;
    for (std::size_t k = 0; k < box_.size(); ++k) idx = idx * static_cast<std::size_t>(box_[k]) + (*z)[k].get_ui();
    return idx;
}

Rat DiscGroup::qnorm(std::size_t i) const {
    Vec v = rep_vector(i);
    Rat q = L_.h(v, v).a();
    Int fl;
    mpz_fdiv_q(fl.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return q - Rat(fl);
}

Rat DiscGroup::bilinear(std::size_t i, std::size_t j) const {
    Rat t = L_.h(rep_vector(i), rep_vector(j)).trace();
    Int fl;
    mpz_fdiv_q(fl.get_mpz_t(), t.get_num_mpz_t(), t.get_den_mpz_t());
    return t - Rat(fl);
}

std::size_t DiscGroup::negate(std::size_t i) const {
    auto z = rep(i);
    for (auto& x : z) x = -x;
    return index_of_dual(z);
}

std::size_t DiscGroup::add(std::size_t i, std::size_t j) const {
    auto a = rep(i), b = rep(j);
    for (std::size_t k = 0; k < a.size(); ++k) a[k] += b[k];
    return index_of_dual(a);
}

// ---------------------------------------------------------------- enumeration

namespace {

struct FpData {
    std::size_t m;
    std::vector<long double> q;    // diagonal
    std::vector<long double> mu;   // m x m, upper part
    long double bound2;            // bound on z^T A z, A = S^{-1}
};

void fp_recurse(const FpData& fp, std::vector<long>& z, std::size_t i, long double rem,
                std::vector<std::vector<long>>& out) {
    long double c = 0;
    for (std::size_t j = i + 1; j < fp.m; ++j) c -= fp.mu[i * fp.m + j] * z[j];
    long double r = std::sqrt(std::max<long double>(rem, 0) / fp.q[i]);
    long lo = static_cast<long>(std::ceil(c - r - 1e-9L));
    long hi = static_cast<long>(std::floor(c + r + 1e-9L));
    for (long v = lo; v <= hi; ++v) {
        z[i] = v;
        long double t = v - c;
        long double nr = rem - fp.q[i] * t * t;
        if (nr < -1e-9L * (1 + fp.bound2)) continue;
        if (i == 0) out.push_back(z);
        else fp_recurse(fp, z, i - 1, nr, out);
    }
    z[i] = 0;
}

}  // namespace

std::vector<LatticeVector> enumerate_vectors(const HermLattice& L, const DiscGroup& D, const Rat& bound,
                                             const EnumOptions& opt) {
    if (L.definiteness() != Definiteness::positive) throw std::invalid_argument("enumeration needs a positive lattice");
    if (bound < 0) return {};
    std::size_t m = 2 * L.rank();
    std::vector<LatticeVector> res;
    if (m == 0) {
        res.push_back(LatticeVector{{}, {}, 0, 0});
        return res;
    }
    // exact LDL^T data of A = S^{-1}
    Matrix<Rat> a = L.trace_gram_inv();
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            a(j, i) = a(i, j);
            a(i, j) /= a(i, i);
        }
        for (std::size_t k = i + 1; k < m; ++k)
            for (std::size_t l = k; l < m; ++l) a(k, l) -= a(k, i) * a(i, l);
    }
    FpData fp;
    fp.m = m;
    fp.q.resize(m);
    fp.mu.assign(m * m, 0);
    for (std::size_t i = 0; i < m; ++i) {
        fp.q[i] = static_cast<long double>(a(i, i).get_d());
        for (std::size_t j = i + 1; j < m; ++j) fp.mu[i * m + j] = static_cast<long double>(a(i, j).get_d());
    }
    Rat b2 = 2 * bound;
    fp.bound2 = static_cast<long double>(b2.get_d());
    long double budget = fp.bound2 * (1 + 1e-12L) + 1e-12L;

    // integer adjugate for the exact check: z^T adj z / det = z^T A z
    const Int& det = L.trace_det();
    std::vector<std::int64_t> adj(m * m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            Rat v = L.trace_gram_inv()(i, j) * Rat(det);
            adj[i * m + j] = to_i64(v.get_num());
        }

    // split the outermost coordinate across workers
    long double rtop = std::sqrt(budget / fp.q[m - 1]);
    long lo = static_cast<long>(std::ceil(-rtop - 1e-9L)), hi = static_cast<long>(std::floor(rtop + 1e-9L));
    unsigned workers = std::max(1u, opt.workers);
    std::vector<std::vector<std::vector<long>>> parts(workers);
    auto run = [&](unsigned w) {
        std::vector<long> z(m, 0);
        for (long v = lo + static_cast<long>(w); v <= hi; v += static_cast<long>(workers)) {
            z[m - 1] = v;
            long double nr = budget - fp.q[m - 1] * static_cast<long double>(v) * v;
            if (nr < -1e-9L * (1 + fp.bound2)) continue;
            if (m == 1) parts[w].push_back(z);
            else fp_recurse(fp, z, m - 2, nr, parts[w]);
        }
    };
    if (workers == 1) run(0);
    else {
        std::vector<std::thread> th;
        for (unsigned w = 0; w < workers; ++w) th.emplace_back(run, w);
        for (auto& t : th) t.join();
    }
    std::vector<std::vector<long>> all;
    for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
    std::sort(all.begin(), all.end());

    for (auto& z : all) {
        __int128 acc = 0;
        for (std::size_t i = 0; i < m; ++i) {
            if (z[i] == 0) continue;
            __int128 row = 0;
            for (std::size_t j = 0; j < m; ++j) row += static_cast<__int128>(adj[i * m + j]) * z[j];
            acc += row * z[i];
        }
        Rat norm(i128_to_mpz(acc), 2 * det);
        norm.canonicalize();
        if (norm > bound) continue;
        LatticeVector lv;
        lv.x = L.from_dual(z);
        if (opt.region == Region::lattice && !L.in_lattice(lv.x)) continue;
        lv.z = z;
        lv.norm = norm;
        lv.coset = D.index_of_dual(z);
        res.push_back(std::move(lv));
    }
    return res;
}

std::vector<LatticeVector> enumerate_vectors(const HermLattice& L, const Rat& bound, const EnumOptions& opt) {
    DiscGroup D(L);
    return enumerate_vectors(L, D, bound, opt);
}

PairingTable::PairingTable(const HermLattice& L) : d_(L.field().d), m_(2 * L.rank()) {
    const Int& det = L.trace_det();
    adj_.resize(m_ * m_);
    for (std::size_t i = 0; i < m_; ++i)
        for (std::size_t j = 0; j < m_; ++j) adj_[i * m_ + j] = to_i64(Rat(L.trace_gram_inv()(i, j) * Rat(det)).get_num());
    const QuadField& k = L.field();
    FieldElem pw[2] = {k.one(), k.omega()};
    std::vector<FieldElem> c(m_ * m_);
    std::vector<Rat> dens;
    std::size_t n = L.rank();
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t t = 0; t < n; ++t)
            for (int al = 0; al < 2; ++al)
                for (int be = 0; be < 2; ++be) {
                    FieldElem v = pw[al] * L.gram()(s, t) * pw[be].conj();
                    c[(2 * s + al) * m_ + 2 * t + be] = v;
                    dens.push_back(v.a());
                    dens.push_back(v.b());
                }
    Int gden = lcm_den(dens);
    ha_.resize(m_ * m_);
    hb_.resize(m_ * m_);
    for (std::size_t i = 0; i < m_ * m_; ++i) {
        ha_[i] = to_i64(Rat(c[i].a() * Rat(gden)).get_num());
        hb_[i] = to_i64(Rat(c[i].b() * Rat(gden)).get_num());
    }
    scale_ = gden * det * det;
}

std::vector<std::int64_t> PairingTable::scaled(const std::vector<long>& z) const {
    std::vector<std::int64_t> X(m_, 0);
    for (std::size_t i = 0; i < m_; ++i)
        for (std::size_t j = 0; j < m_; ++j) X[i] += adj_[i * m_ + j] * z[j];
    return X;
}

std::pair<__int128, __int128> PairingTable::pair(const std::vector<std::int64_t>& X,
                                                 const std::vector<std::int64_t>& Y) const {
    __int128 a = 0, b = 0;
    for (std::size_t i = 0; i < m_; ++i) {
        if (X[i] == 0) continue;
        __int128 ra = 0, rb = 0;
        for (std::size_t j = 0; j < m_; ++j) {
            ra += static_cast<__int128>(ha_[i * m_ + j]) * Y[j];
            rb += static_cast<__int128>(hb_[i * m_ + j]) * Y[j];
        }
        a += ra * X[i];
        b += rb * X[i];
    }
    return {a, b};
}

FieldElem PairingTable::value(const std::pair<__int128, __int128>& p) const {
    return FieldElem(d_, Rat(i128_to_mpz(p.first), scale_), Rat(i128_to_mpz(p.second), scale_));
}

Matrix<FieldElem> gram_of(const HermLattice& L, const std::vector<Vec>& tuple) {
    std::size_t g = tuple.size();
    Matrix<FieldElem> N(g, g);
    for (std::size_t i = 0; i < g; ++i)
        for (std::size_t j = 0; j < g; ++j) N(i, j) = L.h(tuple[i], tuple[j]);
    return N;
}

std::vector<std::vector<LatticeVector>> enumerate_tuples(const HermLattice& L, const DiscGroup& D,
                                                         const Matrix<FieldElem>& N,
                                                         const std::optional<std::vector<std::size_t>>& cosets,
                                                         const EnumOptions& opt) {
    std::size_t g = N.rows();
    if (N.cols() != g) throw std::invalid_argument("Gram target must be square");
    if (!is_hermitian(N)) throw std::invalid_argument("Gram target is not Hermitian");
    if (!is_psd(N)) throw std::invalid_argument("Gram target is not positive semidefinite");
    if (cosets && cosets->size() != g) throw std::invalid_argument("coset tuple has wrong length");
    std::vector<std::vector<LatticeVector>> out;
    for (std::size_t i = 0; i < g; ++i)
        for (std::size_t j = 0; j < g; ++j)
            if (i != j && !in_inverse_different(L.field(), N(i, j))) return out;
    if (g == 0) {
        out.emplace_back();
        return out;
    }
    Rat maxd = 0;
    for (std::size_t i = 0; i < g; ++i) maxd = std::max(maxd, N(i, i).a());
    auto vecs = enumerate_vectors(L, D, maxd, opt);
    PairingTable pt(L);
    std::vector<std::vector<std::size_t>> cand(g);
    std::vector<std::vector<std::int64_t>> scaled(vecs.size());
    for (std::size_t v = 0; v < vecs.size(); ++v) scaled[v] = pt.scaled(vecs[v].z);
    for (std::size_t i = 0; i < g; ++i)
        for (std::size_t v = 0; v < vecs.size(); ++v)
            if (vecs[v].norm == N(i, i).a() && (!cosets || (*cosets)[i] == vecs[v].coset)) cand[i].push_back(v);
    // exact targets in scaled integer form
    std::vector<std::pair<Int, Int>> target(g * g);
    for (std::size_t i = 0; i < g; ++i)
        for (std::size_t j = 0; j < g; ++j) {
            Rat a = N(i, j).a() * Rat(pt.scale()), b = N(i, j).b() * Rat(pt.scale());
            target[i * g + j] = {a.get_den() == 1 ? a.get_num() : Int(-1) << 200,
                                 b.get_den() == 1 ? b.get_num() : Int(-1) << 200};
        }
    std::vector<std::size_t> cur(g);
    auto rec = [&](auto&& self, std::size_t i) -> void {
        if (i == g) {
            std::vector<LatticeVector> t;
            for (auto c : cur) t.push_back(vecs[c]);
            out.push_back(std::move(t));
            return;
        }
        for (auto v : cand[i]) {
            bool ok = true;
            for (std::size_t j = 0; j < i && ok; ++j) {
                auto p = pt.pair(scaled[v], scaled[cur[j]]);
                ok = i128_to_mpz(p.first) == target[i * g + j].first && i128_to_mpz(p.second) == target[i * g + j].second;
            }
            if (!ok) continue;
            cur[i] = v;
            self(self, i + 1);
        }
    };
    rec(rec, 0);
    return out;
}

}  // namespace hqm
