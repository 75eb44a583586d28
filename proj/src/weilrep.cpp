#include "hqm/weilrep.hpp"

#include <map>
#include <stdexcept>

namespace hqm {

namespace {

Rat frac(const Rat& x) {
    Int fl;
    mpz_fdiv_q(fl.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    Rat r = x - Rat(fl);
    r.canonicalize();
    return r;
}

bool is_unit(const FieldElem& u) { return u.is_integral() && u.norm() == 1; }

FieldElem power(const FieldElem& x, long e) {
    FieldElem b = e < 0 ? x.inverse() : x;
    if (e < 0) e = -e;
    FieldElem r(1);
    for (long i = 0; i < e; ++i) r *= b;
    return r;
}

void check_square(const Matrix<FieldElem>& m, std::size_t g, const char* what) {
    if (m.rows() != g || m.cols() != g)
        throw std::invalid_argument(std::string(what) + " must be " + std::to_string(g) + "x" + std::to_string(g));
}

class PhaseCache {
public:
    const Cplx& operator()(const Rat& x) {
        Rat f = frac(x);
        auto it = cache_.find(f);
        if (it != cache_.end()) return it->second;
        return cache_.emplace(f, expi2pi(f)).first->second;
    }

private:
    std::map<Rat, Cplx> cache_;
};

}  // namespace

const char* convention_name(WeilConvention c) { return c == WeilConvention::full ? "full" : "half"; }

WeilRep::WeilRep(const HermLattice& L, std::size_t g, WeilConvention conv)
    : L_(L), D_(L), g_(g), dim_(1), conv_(conv) {
    if (g == 0) throw std::invalid_argument("genus must be positive");
    for (std::size_t i = 0; i < g; ++i) {
        if (dim_ > (std::size_t(1) << 24) / D_.order()) throw std::invalid_argument("Weil representation too large");
        dim_ *= D_.order();
    }
    std::size_t o = D_.order();
    std::vector<Vec> reps(o);
    for (std::size_t i = 0; i < o; ++i) reps[i] = D_.rep_vector(i);
    tr_.resize(o * o);
    for (std::size_t i = 0; i < o; ++i)
        for (std::size_t j = 0; j < o; ++j) tr_[i * o + j] = L_.h(reps[i], reps[j]).trace();
}

std::vector<std::size_t> WeilRep::tuple(std::size_t i) const {
    std::vector<std::size_t> t(g_);
    for (std::size_t k = g_; k-- > 0;) {
        t[k] = i % D_.order();
        i /= D_.order();
    }
    return t;
}

std::size_t WeilRep::index(const std::vector<std::size_t>& t) const {
    std::size_t i = 0;
    for (auto c : t) i = i * D_.order() + c;
    return i;
}

MonomialMatrix MonomialMatrix::operator*(const MonomialMatrix& o) const {
    // (this * o) e_j = this(o.scalar[j] e_{o.perm[j]})
    MonomialMatrix r;
    r.perm.resize(o.perm.size());
    r.scalar.resize(o.perm.size());
    for (std::size_t j = 0; j < o.perm.size(); ++j) {
        r.perm[j] = perm[o.perm[j]];
        r.scalar[j] = o.scalar[j] * scalar[o.perm[j]];
    }
    return r;
}

bool MonomialMatrix::is_identity() const {
    for (std::size_t j = 0; j < perm.size(); ++j)
        if (perm[j] != j || scalar[j] != FieldElem(1)) return false;
    return true;
}

CMatrix MonomialMatrix::to_dense(const QuadField& k, unsigned bits) const {
    PrecisionGuard pg(bits);
    CMatrix m(perm.size(), perm.size());
    for (std::size_t j = 0; j < perm.size(); ++j) m(perm[j], j) = embed(scalar[j], k, bits);
    return m;
}

MonomialMatrix rho_m(const WeilRep& rep, const Matrix<FieldElem>& a, std::optional<long> exponent) {
    std::size_t g = rep.genus();
    check_square(a, g, "A");
    for (auto& x : a.data())
        if (!x.is_integral()) throw std::invalid_argument("A must have integral entries");
    FieldElem det = linalg::determinant(a);
    if (!is_unit(det)) throw std::invalid_argument("det(A) is not a unit");
    Matrix<FieldElem> ainv = linalg::inverse(a);
    const auto& D = rep.disc();
    const auto& L = rep.lattice();
    long e = exponent ? *exponent : L.pos_index() + L.neg_index();
    FieldElem sc = power(det, -e);

    std::vector<Vec> reps(D.order());
    for (std::size_t i = 0; i < D.order(); ++i) reps[i] = D.rep_vector(i);

    MonomialMatrix r;
    r.perm.resize(rep.dim());
    r.scalar.assign(rep.dim(), sc);
    for (std::size_t b = 0; b < rep.dim(); ++b) {
        auto nu = rep.tuple(b);
        std::vector<std::size_t> out(g);
        for (std::size_t j = 0; j < g; ++j) {
            Vec v(L.rank(), FieldElem(0));
            for (std::size_t i = 0; i < g; ++i) {
                if (ainv(i, j).is_zero()) continue;
                for (std::size_t s = 0; s < L.rank(); ++s) v[s] += reps[nu[i]][s] * ainv(i, j);
            }
            out[j] = D.index_of(v);
        }
        r.perm[b] = rep.index(out);
    }
    return r;
}

std::vector<Rat> rho_n(const WeilRep& rep, const Matrix<FieldElem>& b) {
    std::size_t g = rep.genus();
    check_square(b, g, "B");
    for (std::size_t i = 0; i < g; ++i)
        for (std::size_t j = 0; j < g; ++j) {
            if (b(i, j) != b(j, i).conj()) throw std::invalid_argument("B must be Hermitian");
            if (!b(i, j).is_integral()) throw std::invalid_argument("B must have integral entries");
        }
    const auto& D = rep.disc();
    const auto& L = rep.lattice();
    std::vector<Vec> reps(D.order());
    for (std::size_t i = 0; i < D.order(); ++i) reps[i] = D.rep_vector(i);

    std::vector<Rat> out(rep.dim());
    for (std::size_t k = 0; k < rep.dim(); ++k) {
        auto nu = rep.tuple(k);
        FieldElem t(0);
        for (std::size_t i = 0; i < g; ++i)
            for (std::size_t j = 0; j < g; ++j)
                if (!b(j, i).is_zero()) t += L.h(reps[nu[i]], reps[nu[j]]) * b(j, i);
        if (!t.is_rational()) throw std::logic_error("Tr(h(nu)B) is not real");
        Rat ph = t.a();
        if (rep.convention() == WeilConvention::half) ph /= 2;
        out[k] = frac(ph);
    }
    return out;
}

CMatrix phases_to_diag(const std::vector<Rat>& ph, unsigned bits) {
    PrecisionGuard pg(bits);
    PhaseCache e;
    CMatrix m(ph.size(), ph.size());
    for (std::size_t i = 0; i < ph.size(); ++i) m(i, i) = e(ph[i]);
    return m;
}

WeilIndex weil_index(const WeilRep& rep, unsigned bits) {
    PrecisionGuard pg(bits);
    const auto& D = rep.disc();
    PhaseCache e;
    Cplx s;
    for (std::size_t i = 0; i < D.order(); ++i) {
        Rat q = rep.trace_pairing(i, i) / 2;  // h(nu, nu)
        if (rep.convention() == WeilConvention::half) q /= 2;
        s += e(-q);
    }
    if (s.abs() < Real("1e-20")) throw std::domain_error("Gauss sum vanishes; inconsistent lattice data");
    WeilIndex w;
    w.genus1 = s / Cplx(boost::multiprecision::sqrt(Real(static_cast<unsigned long>(D.order()))));
    Real tol("1e-12");
    for (int k = 0; k < 8; ++k)
        if ((w.genus1 - expi2pi(Rat(k, 8))).abs() < tol) w.eighth = k;
    w.value = cpow_int(w.genus1, static_cast<long>(rep.genus()));
    w.branch = rep.convention() == WeilConvention::full ? "sum e(-h(nu,nu))/sqrt|D|, genus power"
                                                        : "sum e(-h(nu,nu)/2)/sqrt|D|, genus power";
    return w;
}

CMatrix rho_w(const WeilRep& rep, unsigned bits) {
    PrecisionGuard pg(bits);
    WeilIndex gi = weil_index(rep, bits);
    std::size_t g = rep.genus(), dim = rep.dim();
    Real nd = boost::multiprecision::pow(Real(static_cast<unsigned long>(rep.disc().order())), Real(g) / 2);
    Cplx scale = gi.value / Cplx(nd);
    bool half = rep.convention() == WeilConvention::half;
    PhaseCache e;
    CMatrix m(dim, dim);
    std::vector<std::vector<std::size_t>> tup(dim);
    for (std::size_t i = 0; i < dim; ++i) tup[i] = rep.tuple(i);
    for (std::size_t mu = 0; mu < dim; ++mu)
        for (std::size_t nu = 0; nu < dim; ++nu) {
            Rat t = 0;
            for (std::size_t i = 0; i < g; ++i) t += rep.trace_pairing(tup[nu][i], tup[mu][i]);
            if (half) t /= 2;
            m(mu, nu) = scale * e(-t);
        }
    return m;
}

CMatrix rho_gen(const WeilRep& rep, const GroupGen& gen, unsigned bits) {
    switch (gen.kind) {
        case GroupGen::Kind::m:
            return rho_m(rep, gen.mat).to_dense(rep.lattice().field(), bits);
        case GroupGen::Kind::n:
            return phases_to_diag(rho_n(rep, gen.mat), bits);
        case GroupGen::Kind::w:
            return rho_w(rep, bits);
    }
    throw std::logic_error("unknown generator");
}

CMatrix rho_word(const WeilRep& rep, const std::vector<GroupGen>& gens, unsigned bits) {
    if (gens.empty()) throw std::invalid_argument("empty generator word");
    PrecisionGuard pg(bits);
    CMatrix r = rho_gen(rep, gens[0], bits);
    for (std::size_t i = 1; i < gens.size(); ++i) r = r * rho_gen(rep, gens[i], bits);
    return r;
}

}  // namespace hqm
