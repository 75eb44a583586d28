#include "hqm/thetagen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace hqm {

namespace {

using I64 = std::int64_t;
using Zw = std::pair<I64, I64>;  // a + b w

struct ZwRing {
    I64 t = 0, nrm = 1;

    static I64 mul(I64 a, I64 b) {
        I64 r;
        if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("theta moment overflow");
        return r;
    }
    static I64 add(I64 a, I64 b) {
        I64 r;
        if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("theta moment overflow");
        return r;
    }
    Zw times(const Zw& x, const Zw& y) const {
        // w^2 = t w - nrm
        I64 bd = mul(x.second, y.second);
        return {add(mul(x.first, y.first), -mul(nrm, bd)),
                add(add(mul(x.first, y.second), mul(x.second, y.first)), mul(t, bd))};
    }
    Zw conj(const Zw& x) const { return {add(x.first, mul(t, x.second)), -x.second}; }
    static Zw plus(const Zw& x, const Zw& y) { return {add(x.first, y.first), add(x.second, y.second)}; }
    static Zw minus(const Zw& x, const Zw& y) { return {add(x.first, -y.first), add(x.second, -y.second)}; }
};

struct Perm {
    std::vector<int> p;
    int sign;
};

std::vector<Perm> perms(int m) {
    std::vector<int> p(m);
    std::iota(p.begin(), p.end(), 0);
    std::vector<Perm> out;
    do {
        int inv = 0;
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j)
                if (p[i] > p[j]) ++inv;
        out.push_back({p, inv % 2 ? -1 : 1});
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

Rat rat_div(I64 a, const Int& den) {
    Rat r{Int(static_cast<long>(a))};
    r /= Rat(den);
    return r;
}

FieldElem zw_elem(long d, const Zw& z, const Int& den) {
    return FieldElem(d, rat_div(z.first, den), rat_div(z.second, den));
}

Int ipow(const Int& b, unsigned e) {
    Int r = 1;
    for (unsigned i = 0; i < e; ++i) r *= b;
    return r;
}

// per-worker accumulation
struct Acc {
    std::vector<I64> key;
    Rat trace;
    std::size_t count = 0;
    std::vector<std::vector<Zw>> moments;
    std::vector<std::uint32_t> tuples;
};

}  // namespace

ThetaData::ThetaData(const HermLattice& L, int g, const Rat& T, unsigned workers)
    : L_(L), rep_(L, static_cast<std::size_t>(std::max(g, 1))), g_(g), T_(T) {
    if (L.definiteness() != Definiteness::positive) throw std::invalid_argument("theta series need a positive definite lattice");
    if (g < 1) throw std::invalid_argument("genus must be at least 1");
    if (T < 0) throw std::invalid_argument("truncation must be non-negative");
    const auto& k = L.field();
    const int n = static_cast<int>(L.rank());
    EnumOptions opt;
    opt.workers = std::max(1u, workers);
    vecs_ = enumerate_vectors(L, rep_.disc(), T, opt);

    den_ = 1;
    for (auto& f : rep_.disc().invariant_factors())
        if (f > den_) den_ = f;

    ZwRing R{omega_trace(k.d), 0};
    {
        Rat nr = omega_norm(k.d);
        if (nr.get_den() != 1) throw std::logic_error("omega norm not integral");
        R.nrm = nr.get_num().get_si();
    }
    // integer coordinates
    std::vector<std::vector<Zw>> X(vecs_.size(), std::vector<Zw>(n));
    for (std::size_t v = 0; v < vecs_.size(); ++v)
        for (int s = 0; s < n; ++s) {
            Rat a = vecs_[v].x[s].a() * Rat(den_), b = vecs_[v].x[s].b() * Rat(den_);
            if (a.get_den() != 1 || b.get_den() != 1) throw std::logic_error("dual vector not killed by the exponent");
            if (!a.get_num().fits_slong_p() || !b.get_num().fits_slong_p()) throw std::overflow_error("coordinates too large");
            X[v][s] = {a.get_num().get_si(), b.get_num().get_si()};
        }
    Int gden = 1;
    for (std::size_t s = 0; s < L.rank(); ++s)
        for (std::size_t t = 0; t < L.rank(); ++t) {
            gden = lcm(gden, L.gram()(s, t).a().get_den());
            gden = lcm(gden, L.gram()(s, t).b().get_den());
        }
    std::vector<Zw> G(n * n);
    for (int s = 0; s < n; ++s)
        for (int t = 0; t < n; ++t) {
            Rat a = L.gram()(s, t).a() * Rat(gden), b = L.gram()(s, t).b() * Rat(gden);
            G[s * n + t] = {a.get_num().get_si(), b.get_num().get_si()};
        }

    mu_ = 0;
    for (auto& v : vecs_)
        if (v.norm > 0 && (mu_ == 0 || v.norm < mu_)) mu_ = v.norm;
    if (mu_ == 0) {
        Rat b = T > 0 ? T : Rat(1);
        for (;;) {
            b *= 2;
            for (auto& v : enumerate_vectors(L, rep_.disc(), b))
                if (v.norm > 0 && (mu_ == 0 || v.norm < mu_)) mu_ = v.norm;
            if (mu_ > 0) break;
        }
    }
    {
        PrecisionGuard pg(64);
        CMatrix gm(n, n);
        for (int s = 0; s < n; ++s)
            for (int t = 0; t < n; ++t) gm(s, t) = embed(L.gram()(s, t), k, 64);
        gmin_ = to_double(min_eigenvalue(gm)) * (1 - 1e-9);
        if (gmin_ <= 0) throw std::logic_error("gram not positive definite");
    }

    // subsets and permutations
    std::vector<std::vector<Subset>> rowsub(g + 1), colsub(g + 1);
    std::vector<std::vector<Perm>> pm(g + 1);
    for (int m = 0; m <= g; ++m) {
        rowsub[m] = combinations(n, m);
        colsub[m] = combinations(g, m);
        pm[m] = perms(m);
    }

    // sorted by norm for pruning
    std::vector<std::uint32_t> order(vecs_.size());
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return vecs_[a].norm < vecs_[b].norm; });
    std::vector<Rat> sorted_norm(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) sorted_norm[i] = vecs_[order[i]].norm;

    unsigned W = std::max(1u, std::min<unsigned>(opt.workers, 64));
    std::vector<std::map<std::vector<I64>, Acc>> parts(W);
    std::vector<std::size_t> part_tuples(W, 0);

    auto work = [&](unsigned w) {
        auto& mp = parts[w];
        std::vector<std::uint32_t> tup(g);
        std::vector<Rat> partial(g + 1);
        std::vector<I64> key;
        std::vector<std::vector<Zw>> minors(g + 1);
        auto visit = [&]() {
            // Gram matrix (i <= j) and coset tuple
            key.clear();
            for (int i = 0; i < g; ++i) key.push_back(static_cast<I64>(vecs_[tup[i]].coset));
            for (int i = 0; i < g; ++i)
                for (int j = i; j < g; ++j) {
                    Zw acc{0, 0};
                    const auto& xi = X[tup[i]];
                    const auto& xj = X[tup[j]];
                    for (int s = 0; s < n; ++s) {
                        if (xi[s].first == 0 && xi[s].second == 0) continue;
                        for (int t = 0; t < n; ++t) {
                            const Zw& gst = G[s * n + t];
                            if (gst.first == 0 && gst.second == 0) continue;
                            acc = ZwRing::plus(acc, R.times(R.times(gst, xi[s]), R.conj(xj[t])));
                        }
                    }
                    key.push_back(acc.first);
                    key.push_back(acc.second);
                }
            auto it = mp.find(key);
            if (it == mp.end()) {
                Acc a;
                a.key = key;
                a.trace = partial[g];
                a.moments.resize(g + 1);
                for (int m = 0; m <= g; ++m) {
                    std::size_t sz = rowsub[m].size() * colsub[m].size();
                    a.moments[m].assign(sz * sz, Zw{0, 0});
                }
                it = mp.emplace(key, std::move(a)).first;
            }
            Acc& a = it->second;
            ++a.count;
            a.tuples.insert(a.tuples.end(), tup.begin(), tup.end());
            for (int m = 0; m <= g; ++m) {
                auto& mi = minors[m];
                mi.assign(rowsub[m].size() * colsub[m].size(), Zw{0, 0});
                for (std::size_t iI = 0; iI < rowsub[m].size(); ++iI)
                    for (std::size_t iS = 0; iS < colsub[m].size(); ++iS) {
                        Zw det{0, 0};
                        for (auto& p : pm[m]) {
                            Zw prod{1, 0};
                            for (int r = 0; r < m && (prod.first || prod.second); ++r)
                                prod = R.times(prod, X[tup[colsub[m][iS][p.p[r]]]][rowsub[m][iI][r]]);
                            det = p.sign > 0 ? ZwRing::plus(det, prod) : ZwRing::minus(det, prod);
                        }
                        mi[iI * colsub[m].size() + iS] = det;
                    }
                std::size_t sz = mi.size();
                for (std::size_t p = 0; p < sz; ++p) {
                    if (!mi[p].first && !mi[p].second) continue;
                    for (std::size_t q = 0; q < sz; ++q) {
                        if (!mi[q].first && !mi[q].second) continue;
                        auto& slot = a.moments[m][p * sz + q];
                        slot = ZwRing::plus(slot, R.times(mi[p], R.conj(mi[q])));
                    }
                }
            }
            ++part_tuples[w];
        };
        // depth-first over norm-sorted vectors; worker w owns first indices i = w mod W
        auto rec = [&](auto&& self, int depth) -> void {
            if (depth == g) {
                visit();
                return;
            }
            Rat rem = T_ - partial[depth];
            std::size_t lim = std::upper_bound(sorted_norm.begin(), sorted_norm.end(), rem) - sorted_norm.begin();
            for (std::size_t i = 0; i < lim; ++i) {
                if (depth == 0 && i % W != w) continue;
                tup[depth] = order[i];
                partial[depth + 1] = partial[depth] + sorted_norm[i];
                self(self, depth + 1);
            }
        };
        partial[0] = 0;
        rec(rec, 0);
    };
    if (W == 1) work(0);
    else {
        std::vector<std::thread> th;
        for (unsigned w = 0; w < W; ++w) th.emplace_back(work, w);
        for (auto& t : th) t.join();
    }

    // merge in worker order
    std::map<std::vector<I64>, Acc> all = std::move(parts[0]);
    for (unsigned w = 1; w < W; ++w)
        for (auto& [key, a] : parts[w]) {
            auto it = all.find(key);
            if (it == all.end()) {
                all.emplace(key, std::move(a));
                continue;
            }
            Acc& b = it->second;
            b.count += a.count;
            b.tuples.insert(b.tuples.end(), a.tuples.begin(), a.tuples.end());
            for (int m = 0; m <= g; ++m)
                for (std::size_t i = 0; i < a.moments[m].size(); ++i)
                    b.moments[m][i] = ZwRing::plus(b.moments[m][i], a.moments[m][i]);
        }
    for (auto c : part_tuples) ntuples_ += c;

    Int nscale = den_ * den_ * gden;
    cells_.reserve(all.size());
    for (auto& [key, a] : all) {
        Cell c;
        c.cosets.assign(key.begin(), key.begin() + g);
        c.component = rep_.index(c.cosets);
        c.N = Matrix<FieldElem>(g, g);
        std::size_t pos = g;
        for (int i = 0; i < g; ++i)
            for (int j = i; j < g; ++j) {
                FieldElem v = zw_elem(k.d, {key[pos], key[pos + 1]}, nscale);
                pos += 2;
                c.N(i, j) = v;
                c.N(j, i) = v.conj();
            }
        c.trace = a.trace;
        c.count = a.count;
        c.moments = std::move(a.moments);
        // canonical tuple order inside the cell
        std::vector<std::vector<std::uint32_t>> ts(a.count);
        for (std::size_t t = 0; t < a.count; ++t) ts[t].assign(a.tuples.begin() + t * g, a.tuples.begin() + (t + 1) * g);
        std::sort(ts.begin(), ts.end());
        for (auto& t : ts) c.tuples.insert(c.tuples.end(), t.begin(), t.end());
        cells_.push_back(std::move(c));
    }
    std::stable_sort(cells_.begin(), cells_.end(), [](const Cell& a, const Cell& b) {
        if (a.trace != b.trace) return a.trace < b.trace;
        for (std::size_t i = 0; i < a.N.data().size(); ++i)
            if (a.N.data()[i] != b.N.data()[i]) return a.N.data()[i] < b.N.data()[i];
        return a.cosets < b.cosets;
    });
}

std::vector<std::vector<FieldElem>> ThetaData::tuple(const Cell& c, std::size_t t) const {
    std::vector<std::vector<FieldElem>> out;
    for (int i = 0; i < g_; ++i) out.push_back(vecs_.at(c.tuples.at(t * g_ + i)).x);
    return out;
}

Coef ThetaData::moment_value(const Cell& c, const FPoly& P, std::size_t S, std::size_t T) const {
    int m = P.genus();
    if (m > g_) throw std::invalid_argument("weight genus exceeds series genus");
    const auto& fam = P.family();
    std::size_t nr = fam->subsets(m).size(), nc = binomial(g_, m);
    std::size_t sz = nr * nc;
    Int den = ipow(den_, 2 * m);
    Coef s(0);
    for (std::size_t i = 0; i < nr; ++i)
        for (std::size_t j = 0; j < nr; ++j) {
            const Coef& cf = P.coeffs()[fam->index(m, i, j)];
            if (cf.is_zero()) continue;
            const Zw& z = c.moments[m][(i * nc + S) * sz + (j * nc + T)];
            if (!z.first && !z.second) continue;
            s += cf * Coef(zw_elem(L_.field().d, z, den));
        }
    return s;
}

Coef ThetaData::holomorphic_value(const Cell& c, const FPoly& P) const {
    if (P.genus() != g_) throw std::invalid_argument("weight must lie in F_{n,g}");
    return moment_value(c, P, 0, 0);
}

TauData tau_data(const CMatrix& tau_in) {
    if (tau_in.rows != tau_in.cols || tau_in.rows == 0) throw std::invalid_argument("tau must be square");
    CMatrix tau = with_precision(tau_in);
    std::size_t g = tau.rows;
    TauData t;
    t.tau = tau;
    t.Y = CMatrix(g, g);
    for (std::size_t i = 0; i < g; ++i)
        for (std::size_t j = 0; j < g; ++j) {
            // (tau - tau^*) / 2i
            Cplx d = tau(i, j) - tau(j, i).conj();
            t.Y(i, j) = Cplx(d.im / 2, -d.re / 2);
        }
    if (!is_positive_definite(t.Y)) throw std::invalid_argument("Im(tau) is not positive definite");
    t.detY = det(t.Y).re;
    t.ymin = min_eigenvalue(t.Y);
    t.minors.resize(g + 1);
    for (std::size_t m = 0; m <= g; ++m) {
        auto subs = combinations(static_cast<int>(g), static_cast<int>(m));
        CMatrix mm(subs.size(), subs.size());
        for (std::size_t a = 0; a < subs.size(); ++a)
            for (std::size_t b = 0; b < subs.size(); ++b) {
                if (m == 0) {
                    mm(a, b) = Cplx(1);
                    continue;
                }
                CMatrix sub(m, m);
                for (std::size_t r = 0; r < m; ++r)
                    for (std::size_t c = 0; c < m; ++c) sub(r, c) = t.Y(subs[a][r], subs[b][c]);
                mm(a, b) = det(sub);
            }
        t.minors[m] = std::move(mm);
    }
    return t;
}

const char* kind_name(SeriesSpec::Kind k) {
    switch (k) {
        case SeriesSpec::Kind::cycles: return "cycles";
        case SeriesSpec::Kind::corrected: return "corrected";
        case SeriesSpec::Kind::weighted: return "weighted";
        case SeriesSpec::Kind::completed: return "completed";
    }
    return "?";
}

SeriesSpec::Kind kind_from_name(const std::string& s) {
    if (s == "cycles") return SeriesSpec::Kind::cycles;
    if (s == "corrected") return SeriesSpec::Kind::corrected;
    if (s == "weighted") return SeriesSpec::Kind::weighted;
    if (s == "completed") return SeriesSpec::Kind::completed;
    throw std::invalid_argument("unknown series kind: " + s);
}

RingPtr ring_for(const HermLattice& L) {
    std::vector<long> a;
    for (std::size_t i = 0; i < L.rank(); ++i)
        for (std::size_t j = 0; j < L.rank(); ++j) {
            const auto& x = L.gram()(i, j);
            if (i != j && !x.is_zero()) throw std::invalid_argument("cycle series need a diagonal lattice");
            if (i == j) {
                if (!x.is_rational() || x.a().get_den() != 1) throw std::invalid_argument("diagonal entries must be integers");
                a.push_back(x.a().get_num().get_si());
            }
        }
    return CohRing::make(L.field(), a);
}

bool uses_completion(const SeriesSpec& spec) {
    return spec.kind == SeriesSpec::Kind::cycles || spec.kind == SeriesSpec::Kind::completed;
}

std::vector<Channel> series_channels(const SeriesSpec& spec) {
    std::vector<Channel> out;
    if (spec.kind == SeriesSpec::Kind::weighted || spec.kind == SeriesSpec::Kind::completed) {
        if (!spec.poly) throw std::invalid_argument("weighted series need a polynomial");
        const auto& P = *spec.poly;
        if (P.genus() != spec.g || P.n() != static_cast<int>(spec.lattice.rank()) ||
            P.family()->gram() != spec.lattice.gram())
            throw std::invalid_argument("polynomial does not match lattice and genus");
        out.push_back({"P", P});
        return out;
    }
    auto ring = ring_for(spec.lattice);
    CycleClassFn Z = spec.kind == SeriesSpec::Kind::cycles ? cycle_class_fn(ring, spec.g) : corrected_fn(ring, spec.g);
    if (spec.test_classes) {
        auto basis = rational_hodge_basis(ring, ring->n() - spec.g);
        for (std::size_t i = 0; i < basis.size(); ++i) out.push_back({"alpha" + std::to_string(i), Z.pair(basis[i])});
        return out;
    }
    for (auto& key : ring->bidegree_basis(spec.g, spec.g)) {
        auto it = Z.data.find(key);
        FPoly p = it == Z.data.end() ? FPoly(ring->family(), spec.g) : it->second;
        out.push_back({std::to_string(key.first) + "," + std::to_string(key.second), p});
    }
    return out;
}

namespace {

struct PreparedTerm {
    std::size_t r;
    std::size_t row_i, row_k;
    Cplx c;
};

// numeric coefficients of lower^r P, r = 0..rmax
std::vector<std::vector<PreparedTerm>> prepare(const FPoly& P, int rmax, const QuadField& k, unsigned bits) {
    std::vector<std::vector<PreparedTerm>> out;
    FPoly Q = P;
    for (int r = 0; r <= rmax && r <= P.genus(); ++r) {
        if (r > 0) Q = Q.lower();
        std::vector<PreparedTerm> terms;
        const auto& fam = Q.family();
        std::size_t nr = fam->subsets(Q.genus()).size();
        for (std::size_t i = 0; i < nr; ++i)
            for (std::size_t j = 0; j < nr; ++j) {
                const Coef& c = Q.coeffs()[fam->index(Q.genus(), i, j)];
                if (!c.is_zero()) terms.push_back({static_cast<std::size_t>(r), i, j, embed(c, k, bits)});
            }
        out.push_back(std::move(terms));
    }
    return out;
}

Cplx zw_num(const std::pair<std::int64_t, std::int64_t>& z, const Cplx& w) {
    return Cplx(Real(static_cast<long>(z.first))) + w * Cplx(Real(static_cast<long>(z.second)));
}

Cplx trace_tau_n(const CMatrix& tau, const Matrix<FieldElem>& N, const QuadField& k, unsigned bits) {
    Cplx s;
    for (std::size_t i = 0; i < tau.rows; ++i)
        for (std::size_t j = 0; j < tau.cols; ++j)
            if (!N(j, i).is_zero()) s += tau(i, j) * embed(N(j, i), k, bits);
    return s;
}

Cplx q_power(const CMatrix& tau, const Matrix<FieldElem>& N, const QuadField& k, unsigned bits) {
    Cplx x = trace_tau_n(tau, N, k, bits);
    Real two_pi = 2 * real_pi();
    // e(x) = exp(2 pi i x)
    return cexp(Cplx(-two_pi * x.im, two_pi * x.re));
}

}  // namespace

Real tail_bound(const ThetaData& td, const std::vector<Channel>& ch, const TauData& t, bool completed) {
    int g = td.genus();
    int n = static_cast<int>(td.lattice().rank());
    double y = to_double(t.ymin);
    if (y <= 0) throw std::invalid_argument("Im(tau) is not positive definite");
    double mu = td.min_dual_norm().get_d();
    double gam = td.min_gram_eigen();
    double detY = to_double(t.detY);
    const auto& k = td.lattice().field();
    // B(s) = sum_r coef[r] * max(1, s / gam)^{g - r}
    std::vector<double> coef(g + 1, 0.0);
    for (auto& c : ch) {
        auto prep = prepare(c.poly, completed ? g : 0, k, 64);
        for (std::size_t r = 0; r < prep.size(); ++r) {
            double cs = 0;
            for (auto& term : prep[r]) cs += to_double(term.c.abs());
            double lam = 1;
            if (r > 0) {
                lam = 0;
                const auto& mm = t.minors[g - r];
                for (auto& v : mm.v) lam += to_double(v.abs());
                lam /= detY;
                lam *= std::pow(1.0 / (4 * M_PI), static_cast<double>(r));
            }
            coef[r] = std::max(coef[r], cs * lam);
        }
    }
    // per tuple |value| <= C prod_j (1 + h_j / gam); for sum h_j > T split
    // exp(-2 pi y sum h) <= exp(-2 pi y eps T) prod exp(-2 pi y (1 - eps) h_j)
    double C = 0;
    for (double c : coef) C += c;
    if (C == 0) return Real(0);
    double T = td.truncation().get_d();
    auto single = [&](double a) {
        double s = 0;
        for (auto& v : td.vectors()) {
            double h = v.norm.get_d();
            s += (1 + h / gam) * std::exp(-a * h);
        }
        // vectors with h > T: shells (T + j, T + j + 1], packing bound on counts
        for (int j = 0; j < 1000000; ++j) {
            double hi = T + j + 1;
            double term = std::exp(2.0 * n * std::log1p(2 * std::sqrt(hi / mu)) - a * (T + j)) * (1 + hi / gam);
            s += term;
            if (j > 10 && term < 1e-30 * s) {
                s += term;
                break;
            }
        }
        return s;
    };
    double best = std::numeric_limits<double>::infinity();
    for (int e = 1; e < 20; ++e) {
        double eps = e / 20.0;
        double lg = -2 * M_PI * y * eps * T + g * std::log(single(2 * M_PI * y * (1 - eps)));
        best = std::min(best, lg);
    }
    double total = C * std::exp(best);
    return Real(total);
}

SeriesValues eval_series(const ThetaData& td, const std::vector<Channel>& ch, const CMatrix& tau, bool completed,
                         unsigned bits) {
    PrecisionGuard pg(bits);
    int g = td.genus();
    if (static_cast<int>(tau.rows) != g) throw std::invalid_argument("tau has wrong size");
    auto t = tau_data(tau);
    const auto& k = td.lattice().field();
    Cplx w = embed(k.omega(), k, bits);
    std::vector<std::vector<std::vector<PreparedTerm>>> prep;
    for (auto& c : ch) prep.push_back(prepare(c.poly, completed ? g : 0, k, bits));
    std::vector<Cplx> fac(g + 1);
    std::vector<Real> inv_den(g + 1);
    Real den = to_real(td.exponent());
    for (int r = 0; r <= g; ++r) {
        fac[r] = Cplx(pow(-1 / (4 * real_pi()), static_cast<long>(r)) / t.detY);
        inv_den[r] = 1 / pow(den, 2 * r);
    }
    std::size_t n = td.lattice().rank();

    SeriesValues out;
    out.values.assign(ch.size(), std::vector<Cplx>(td.rep().dim()));
    std::vector<std::vector<Cplx>> mom(g + 1);
    for (auto& cell : td.cells()) {
        Cplx q = q_power(t.tau, cell.N, k, bits);
        for (int m = 0; m <= g; ++m) {
            mom[m].assign(cell.moments[m].size(), Cplx());
            for (std::size_t i = 0; i < mom[m].size(); ++i)
                if (cell.moments[m][i].first || cell.moments[m][i].second)
                    mom[m][i] = zw_num(cell.moments[m][i], w) * Cplx(inv_den[m]);
        }
        for (std::size_t c = 0; c < ch.size(); ++c) {
            Cplx val;
            for (std::size_t r = 0; r < prep[c].size(); ++r) {
                int m = g - static_cast<int>(r);
                std::size_t nc = binomial(g, m), sz = binomial(n, m) * nc;
                const auto& Ym = t.minors[m];
                Cplx part;
                for (auto& term : prep[c][r])
                    for (std::size_t S = 0; S < nc; ++S)
                        for (std::size_t T = 0; T < nc; ++T) {
                            const Cplx& mv = mom[m][(term.row_i * nc + S) * sz + (term.row_k * nc + T)];
                            if (mv.re == 0 && mv.im == 0) continue;
                            part += term.c * mv * Ym(T, S);  // Tr(Lambda(Y) Lambda(N))
                        }
                val += part * fac[r];
            }
            out.values[c][cell.component] += val * q;
        }
    }
    out.tail = tail_bound(td, ch, t, completed);
    return out;
}

SeriesValues eval_completed(const ThetaData& td, const FPoly& P, const CMatrix& tau, unsigned bits) {
    return eval_series(td, {{"P", P}}, tau, true, bits);
}

NumClass eval_phi_completion(const RingPtr& ring, const ThetaData& td, const TauData& t, const ThetaData::Cell& c,
                             unsigned bits) {
    PrecisionGuard pg(bits);
    int g = td.genus();
    const auto& k = td.lattice().field();
    if (ring->n() != static_cast<int>(td.lattice().rank())) throw std::invalid_argument("ring does not match lattice");
    // exact sums over the cell of the (g - l)-minors of [f(lambda_i, lambda_j)]
    std::vector<std::vector<CohClass>> acc(g + 1);
    std::vector<std::vector<Subset>> subs(g + 1);
    for (int m = 0; m <= g; ++m) {
        subs[m] = combinations(g, m);
        acc[m].assign(subs[m].size() * subs[m].size(), CohClass(ring));
    }
    std::vector<std::vector<CohClass>> F(g, std::vector<CohClass>(g));
    for (std::size_t tt = 0; g > 2 && tt < c.count; ++tt) {
        auto tup = td.tuple(c, tt);
        std::vector<std::vector<Coef>> cv(g);
        for (int i = 0; i < g; ++i) cv[i].assign(tup[i].begin(), tup[i].end());
        for (int i = 0; i < g; ++i)
            for (int j = 0; j < g; ++j) F[i][j] = f_sesq(ring, cv[i], cv[j]);
        for (int m = 2; m < g; ++m) {
            std::size_t ns = subs[m].size();
            for (std::size_t a = 0; a < ns; ++a)
                for (std::size_t b = 0; b < ns; ++b) {
                    // det of F restricted to rows subs[a], columns subs[b]; even classes commute
                    const auto& R = subs[m][a];
                    const auto& C = subs[m][b];
                    std::vector<int> p(m);
                    std::iota(p.begin(), p.end(), 0);
                    CohClass det(ring);
                    do {
                        int inv = 0;
                        for (int i = 0; i < m; ++i)
                            for (int j = i + 1; j < m; ++j)
                                if (p[i] > p[j]) ++inv;
                        CohClass term = one_class(ring);
                        for (int i = 0; i < m && !term.is_zero(); ++i) term = wedge(term, F[R[i]][C[p[i]]]);
                        if (inv % 2) det -= term;
                        else det += term;
                    } while (std::next_permutation(p.begin(), p.end()));
                    acc[m][a * ns + b] += det;
                }
        }
    }
    // minors of size 0 and 1 are linear in the cell sums sum lambda_{i,s} conj lambda_{j,t}
    acc[0][0] = one_class(ring) * Coef(static_cast<long>(c.count));
    if (g >= 2) {
        int n = ring->n();
        Int den2 = td.exponent() * td.exponent();
        for (int i = 0; i < g; ++i)
            for (int j = 0; j < g; ++j) {
                CohClass x(ring);
                for (int s = 0; s < n; ++s)
                    for (int t = 0; t < n; ++t) {
                        const auto& z = c.moments[1][(s * g + i) * (n * g) + (t * g + j)];
                        if (!z.first && !z.second) continue;
                        FieldElem v = zw_elem(k.d, z, den2);
                        x.add_term(Mask(1) << s, Mask(1) << t, Coef(ring->c() * FieldElem(ring->a()[s] * ring->a()[t]) * v));
                    }
                acc[1][i * g + j] = x;
            }
    }
    NumClass out;
    CohClass D = class_D(ring);
    Real four_pi = 4 * real_pi();
    for (int l = 1; l <= g; ++l) {
        int m = g - l;
        Rat fact = factorial(m);
        Real coef = pow(-1 / four_pi, static_cast<long>(l)) / to_real(fact) / t.detY;
        CohClass Dl = power(D, l);
        std::size_t ns = subs[m].size();
        for (std::size_t S = 0; S < ns; ++S)
            for (std::size_t T = 0; T < ns; ++T) {
                // Tr(Lambda(Y) Lambda(F)) = sum Lambda(Y)_{S,T} Lambda(F)_{T,S}
                const CohClass& lf = acc[m][T * ns + S];
                if (lf.is_zero()) continue;
                Cplx y = t.minors[m](S, T) * Cplx(coef);
                CohClass x = wedge(lf, Dl);
                for (auto& [key, cf] : x.terms()) out[key] += y * embed(cf, k, bits);
            }
    }
    return out;
}

SeriesValues eval_phi_series(const RingPtr& ring, const ThetaData& td, const CMatrix& tau, unsigned bits) {
    PrecisionGuard pg(bits);
    auto t = tau_data(tau);
    const auto& k = td.lattice().field();
    int g = td.genus();
    auto basis = ring->bidegree_basis(g, g);
    std::map<MonoKey, std::size_t> pos;
    for (std::size_t i = 0; i < basis.size(); ++i) pos[basis[i]] = i;
    SeriesValues out;
    out.values.assign(basis.size(), std::vector<Cplx>(td.rep().dim()));
    for (auto& cell : td.cells()) {
        auto phi = eval_phi_completion(ring, td, t, cell, bits);
        if (phi.empty()) continue;
        Cplx q = q_power(t.tau, cell.N, k, bits);
        for (auto& [key, v] : phi) out.values[pos.at(key)][cell.component] += v * q;
    }
    std::vector<Channel> ch;
    for (auto& [key, p] : cycle_class_fn(ring, g).data) ch.push_back({"", p});
    out.tail = tail_bound(td, ch, t, true);
    return out;
}

QExpansion qexp(const SeriesSpec& spec, const Rat& T, unsigned workers) {
    ThetaData td(spec.lattice, spec.g, T, workers);
    return qexp(spec, td);
}

QExpansion qexp(const SeriesSpec& spec, const ThetaData& td) {
    if (td.genus() != spec.g) throw std::invalid_argument("theta data genus mismatch");
    QExpansion q;
    q.d = spec.lattice.field().d;
    q.gram = spec.lattice.gram();
    q.g = spec.g;
    q.weight = static_cast<int>(spec.lattice.rank()) + 2;
    q.T = td.truncation();
    q.kind = kind_name(spec.kind);
    auto ch = series_channels(spec);
    bool scalar = spec.kind == SeriesSpec::Kind::weighted || spec.kind == SeriesSpec::Kind::completed;
    RingPtr ring;
    std::vector<MonoKey> keys;
    if (!scalar) {
        ring = ring_for(spec.lattice);
        if (spec.test_classes)
            for (auto& c : ch) q.labels.push_back(c.label);
        else
            keys = ring->bidegree_basis(spec.g, spec.g);
    }
    for (auto& cell : td.cells()) {
        QCoef c;
        c.cosets = cell.cosets;
        c.N = cell.N;
        c.trace = cell.trace;
        if (scalar) {
            c.value = td.holomorphic_value(cell, ch[0].poly);
        } else if (spec.test_classes) {
            std::vector<Coef> v;
            for (auto& x : ch) v.push_back(td.holomorphic_value(cell, x.poly));
            c.value = v;
        } else {
            CohClass x(ring);
            for (std::size_t i = 0; i < keys.size(); ++i)
                if (!ch[i].poly.is_zero()) x.add_term(keys[i].first, keys[i].second, td.holomorphic_value(cell, ch[i].poly));
            c.value = x;
        }
        q.coefficients.push_back(std::move(c));
    }
    return q;
}

bool check_n_compatibility(const QExpansion& q, const HermLattice& L) {
    DiscGroup D(L);
    const auto& k = L.field();
    for (auto& c : q.coefficients) {
        std::size_t g = c.cosets.size();
        std::vector<Vec> reps;
        for (auto i : c.cosets) reps.push_back(D.rep_vector(i));
        for (std::size_t i = 0; i < g; ++i)
            for (std::size_t j = i; j < g; ++j) {
                FieldElem diff = c.N(i, j) - L.h(reps[i], reps[j]);
                if (i == j) {
                    if (!diff.is_rational() || diff.a().get_den() != 1) return false;
                } else if (!in_inverse_different(k, diff)) {
                    return false;
                }
            }
    }
    return true;
}

CMatrix act(const GroupGen& gen, const CMatrix& tau_in, unsigned bits) {
    PrecisionGuard pg(bits);
    CMatrix tau = with_precision(tau_in);
    std::size_t g = tau.rows;
    auto num = [&](const Matrix<FieldElem>& m, const QuadField& k) {
        if (m.rows() != g || m.cols() != g) throw std::invalid_argument("generator has wrong size");
        CMatrix c(g, g);
        for (std::size_t i = 0; i < g; ++i)
            for (std::size_t j = 0; j < g; ++j) c(i, j) = embed(m(i, j), k, bits);
        return c;
    };
    long d = 1;
    if (gen.kind != GroupGen::Kind::w)
        for (auto& x : gen.mat.data())
            if (x.d()) d = x.d();
    QuadField k = make_field(d);
    switch (gen.kind) {
        case GroupGen::Kind::m: {
            auto A = num(gen.mat, k);
            return A * tau * A.adjoint();
        }
        case GroupGen::Kind::n: return tau + num(gen.mat, k);
        case GroupGen::Kind::w: return inverse(tau).scaled(Cplx(-1));
    }
    return tau;
}

ModularityReport check_functional_equation(const ThetaData& td, const std::vector<Channel>& ch, bool completed,
                                           const GroupGen& gen, const CMatrix& tau, double tol, unsigned bits) {
    PrecisionGuard pg(bits);
    const auto& rep = td.rep();
    const auto& k = td.lattice().field();
    long weight = static_cast<long>(td.lattice().rank()) + 2;
    ModularityReport rpt;
    rpt.tau = tau;
    rpt.truncation = td.truncation();
    rpt.tolerance = tol;
    rpt.completed = completed;
    rpt.channels = ch.size();

    CMatrix tau2 = act(gen, tau, bits);
    auto lhs = eval_series(td, ch, tau2, completed, bits);
    auto rhs0 = eval_series(td, ch, tau, completed, bits);

    CMatrix rho;
    Cplx factor(1);
    Real rho_row = 1;
    switch (gen.kind) {
        case GroupGen::Kind::n:
            rpt.generator = "n";
            rho = phases_to_diag(rho_n(rep, gen.mat), bits);
            break;
        case GroupGen::Kind::w: {
            rpt.generator = "w";
            rho = rho_w(rep, bits);
            factor = cpow_int(det(with_precision(tau)), weight);
            rho_row = sqrt(Real(static_cast<long>(rep.dim())));
            break;
        }
        case GroupGen::Kind::m: {
            rpt.generator = "m";
            // theta-compatible form: det(A)^{-k} e_{nu conj(A)^{-1}}, automorphy factor det(A^*)^{-k}
            Matrix<FieldElem> ab(gen.mat.rows(), gen.mat.cols());
            for (std::size_t i = 0; i < ab.rows(); ++i)
                for (std::size_t j = 0; j < ab.cols(); ++j) ab(i, j) = gen.mat(i, j).conj();
            rho = rho_m(rep, ab, -weight).to_dense(k, bits);
            FieldElem dA = linalg::determinant(gen.mat);
            factor = cpow_int(embed(dA.conj(), k, bits), -weight);
            break;
        }
    }
    Real res = 0;
    for (std::size_t c = 0; c < ch.size(); ++c) {
        auto r = rho.apply(rhs0.values[c]);
        for (std::size_t i = 0; i < r.size(); ++i) {
            Real e = (lhs.values[c][i] - factor * r[i]).abs();
            if (e > res) res = e;
        }
    }
    Real tail = lhs.tail + factor.abs() * rho_row * rhs0.tail;
    rpt.residual = to_double(res);
    rpt.tail_bound = to_double(tail);
    rpt.pass = res <= Real(tol) + tail;
    return rpt;
}

ModularityReport check_functional_equation(const SeriesSpec& spec, const GroupGen& gen, const CMatrix& tau,
                                           const Rat& T, double tol, unsigned bits, unsigned workers,
                                           std::optional<bool> force_completed) {
    ThetaData td(spec.lattice, spec.g, T, workers);
    auto ch = series_channels(spec);
    bool completed = force_completed.value_or(uses_completion(spec));
    return check_functional_equation(td, ch, completed, gen, tau, tol, bits);
}

}  // namespace hqm
