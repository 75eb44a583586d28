#include "hqm/intmat.hpp"

#include <algorithm>

namespace hqm {

namespace {

void swap_rows(IMatrix& m, std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(a, j), m(b, j));
}

// rows (a, b) <- (x*a + y*b, -q*a + p*b) style unimodular combination
void combine(IMatrix& m, std::size_t ra, std::size_t rb, const Int& x, const Int& y, const Int& s, const Int& t) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
        Int va = m(ra, j), vb = m(rb, j);
        m(ra, j) = x * va + y * vb;
        m(rb, j) = s * va + t * vb;
    }
}

Int floor_div(const Int& a, const Int& b) {
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

}  // namespace

HnfResult hnf(const IMatrix& a) {
    HnfResult res;
    IMatrix h = a;
    IMatrix u = IMatrix::identity(a.rows());
    std::size_t r = 0;
    for (std::size_t c = 0; c < h.cols() && r < h.rows(); ++c) {
        // gcd-combine all rows below r into row r at column c
        for (std::size_t i = r + 1; i < h.rows(); ++i) {
            if (h(i, c) == 0) continue;
            if (h(r, c) == 0) {
                swap_rows(h, r, i);
                swap_rows(u, r, i);
                continue;
            }
            Int g, x, y;
            mpz_gcdext(g.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t(), h(r, c).get_mpz_t(), h(i, c).get_mpz_t());
            Int s = -h(i, c) / g, t = h(r, c) / g;
            combine(h, r, i, x, y, s, t);
            combine(u, r, i, x, y, s, t);
        }
        if (h(r, c) == 0) continue;
        if (h(r, c) < 0) {
            for (std::size_t j = 0; j < h.cols(); ++j) h(r, j) = -h(r, j);
            for (std::size_t j = 0; j < u.cols(); ++j) u(r, j) = -u(r, j);
        }
        for (std::size_t i = 0; i < r; ++i) {
            Int q = floor_div(h(i, c), h(r, c));
            if (q == 0) continue;
            for (std::size_t j = 0; j < h.cols(); ++j) h(i, j) -= q * h(r, j);
            for (std::size_t j = 0; j < u.cols(); ++j) u(i, j) -= q * u(r, j);
        }
        res.pivots.push_back(c);
        ++r;
    }
    res.rank = r;
    res.h = h;
    res.u = u;
    return res;
}

std::vector<Int> smith_invariants(const IMatrix& a) {
    IMatrix m = a;
    std::size_t rows = m.rows(), cols = m.cols();
    std::vector<Int> d;
    for (std::size_t k = 0; k < std::min(rows, cols); ++k) {
        for (;;) {
            // move the smallest nonzero entry of the block to (k, k)
            std::size_t pi = rows, pj = cols;
            for (std::size_t i = k; i < rows; ++i)
                for (std::size_t j = k; j < cols; ++j)
                    if (m(i, j) != 0 && (pi == rows || abs(m(i, j)) < abs(m(pi, pj)))) {
                        pi = i;
                        pj = j;
                    }
            if (pi == rows) return d;
            swap_rows(m, k, pi);
            for (std::size_t r = 0; r < rows; ++r) std::swap(m(r, k), m(r, pj));
            bool done = true;
            for (std::size_t i = k + 1; i < rows; ++i) {
                Int q = floor_div(m(i, k), m(k, k));
                if (q != 0)
                    for (std::size_t j = k; j < cols; ++j) m(i, j) -= q * m(k, j);
                if (m(i, k) != 0) done = false;
            }
            for (std::size_t j = k + 1; j < cols; ++j) {
                Int q = floor_div(m(k, j), m(k, k));
                if (q != 0)
                    for (std::size_t i = k; i < rows; ++i) m(i, j) -= q * m(i, k);
                if (m(k, j) != 0) done = false;
            }
            if (!done) continue;
            // the pivot must divide the rest of the block
            std::size_t bad = rows;
            for (std::size_t i = k + 1; i < rows && bad == rows; ++i)
                for (std::size_t j = k + 1; j < cols; ++j)
                    if (m(i, j) % m(k, k) != 0) {
                        bad = i;
                        break;
                    }
            if (bad == rows) break;
            for (std::size_t j = k; j < cols; ++j) m(k, j) += m(bad, j);
        }
        d.push_back(abs(m(k, k)));
    }
    return d;
}

Int int_det(const IMatrix& a) {
    Matrix<Rat> q(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) q(i, j) = Rat(a(i, j));
    Rat d = linalg::determinant(q);
    return d.get_num();
}

std::optional<std::vector<Int>> solve_in_row_lattice(const IMatrix& a, const std::vector<Int>& b) {
    HnfResult r = hnf(a);
    // express b in the echelon rows
    std::vector<Int> rem = b;
    std::vector<Int> coef(r.rank, 0);
    for (std::size_t k = 0; k < r.rank; ++k) {
        std::size_t c = r.pivots[k];
        if (rem[c] % r.h(k, c) != 0) return std::nullopt;
        coef[k] = rem[c] / r.h(k, c);
        for (std::size_t j = 0; j < rem.size(); ++j) rem[j] -= coef[k] * r.h(k, j);
    }
    for (auto& x : rem)
        if (x != 0) return std::nullopt;
    std::vector<Int> x(a.rows(), 0);
    for (std::size_t k = 0; k < r.rank; ++k)
        for (std::size_t i = 0; i < a.rows(); ++i) x[i] += coef[k] * r.u(k, i);
    return x;
}

IMatrix left_kernel(const IMatrix& a) {
    HnfResult r = hnf(a);
    IMatrix k(a.rows() - r.rank, a.rows());
    for (std::size_t i = r.rank; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.rows(); ++j) k(i - r.rank, j) = r.u(i, j);
    return k;
}

Int lcm_den(const std::vector<Rat>& v) {
    Int l = 1;
    for (auto& x : v) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
    return l;
}

}  // namespace hqm
