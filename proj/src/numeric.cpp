#include "hqm/numeric.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hqm {

unsigned digits10_for_bits(unsigned bits) {
    // ceil(bits * log10(2)) + 1 guarantees at least `bits` binary digits
    return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
}

PrecisionGuard::PrecisionGuard(unsigned bits) : saved_(Real::default_precision()) {
    if (bits < 53) bits = 53;
    Real::default_precision(digits10_for_bits(bits));
}

PrecisionGuard::~PrecisionGuard() { Real::default_precision(saved_); }

CMatrix with_precision(const CMatrix& a) {
    CMatrix out(a.rows, a.cols);
    unsigned digits = Real::default_precision();
    for (std::size_t i = 0; i < a.v.size(); ++i) out.v[i] = Cplx(Real(a.v[i].re, digits), Real(a.v[i].im, digits));
    return out;
}

Real real_pi() {
    Real r;
    mpfr_const_pi(r.backend().data(), MPFR_RNDN);
    return r;
}

Real to_real(const mpz_class& z) {
    Real r;
    mpfr_set_z(r.backend().data(), z.get_mpz_t(), MPFR_RNDN);
    return r;
}

Real to_real(const mpq_class& q) {
    Real r;
    mpfr_set_q(r.backend().data(), q.get_mpq_t(), MPFR_RNDN);
    return r;
}

Real Cplx::abs() const { return boost::multiprecision::sqrt(abs2()); }

Cplx& Cplx::operator*=(const Cplx& o) {
    Real r = re * o.re - im * o.im;
    Real i = re * o.im + im * o.re;
    re = std::move(r);
    im = std::move(i);
    return *this;
}

Cplx& Cplx::operator/=(const Cplx& o) {
    Real den = o.abs2();
    Real r = (re * o.re + im * o.im) / den;
    Real i = (im * o.re - re * o.im) / den;
    re = std::move(r);
    im = std::move(i);
    return *this;
}

Cplx expi2pi(const Real& x) {
    Real t = 2 * real_pi() * x;
    return {boost::multiprecision::cos(t), boost::multiprecision::sin(t)};
}

Cplx expi2pi(const mpq_class& x) {
    // reduce mod 1 exactly before embedding
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    mpq_class fr = x - mpq_class(fl);
    return expi2pi(to_real(fr));
}

Cplx cexp(const Cplx& z) {
    Real m = boost::multiprecision::exp(z.re);
    return {m * boost::multiprecision::cos(z.im), m * boost::multiprecision::sin(z.im)};
}

Cplx cpow_int(Cplx z, long e) {
    if (e < 0) return Cplx(1) / cpow_int(std::move(z), -e);
    Cplx r(1);
    while (e > 0) {
        if (e & 1) r *= z;
        z *= z;
        e >>= 1;
    }
    return r;
}

Cplx csqrt(const Cplx& z) {
    Real m = z.abs();
    Real re = boost::multiprecision::sqrt((m + z.re) / 2);
    Real im = boost::multiprecision::sqrt((m - z.re) / 2);
    if (z.im < 0) im = -im;
    return {re, im};
}

CMatrix CMatrix::identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Cplx(1);
    return m;
}

CMatrix CMatrix::adjoint() const {
    CMatrix r(cols, rows);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) r(j, i) = (*this)(i, j).conj();
    return r;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    if (a.cols != b.rows) throw std::invalid_argument("matrix shape mismatch");
    CMatrix r(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t k = 0; k < a.cols; ++k) {
            const Cplx& x = a(i, k);
            if (x.re == 0 && x.im == 0) continue;
            for (std::size_t j = 0; j < b.cols; ++j) r(i, j) += x * b(k, j);
        }
    return r;
}

CMatrix operator+(const CMatrix& a, const CMatrix& b) {
    CMatrix r = a;
    for (std::size_t i = 0; i < r.v.size(); ++i) r.v[i] += b.v[i];
    return r;
}

CMatrix operator-(const CMatrix& a, const CMatrix& b) {
    CMatrix r = a;
    for (std::size_t i = 0; i < r.v.size(); ++i) r.v[i] -= b.v[i];
    return r;
}

CMatrix CMatrix::scaled(const Cplx& s) const {
    CMatrix r = *this;
    for (auto& x : r.v) x *= s;
    return r;
}

std::vector<Cplx> CMatrix::apply(const std::vector<Cplx>& x) const {
    std::vector<Cplx> y(rows);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) y[i] += (*this)(i, j) * x[j];
    return y;
}

Real max_abs_diff(const CMatrix& a, const CMatrix& b) {
    Real m = 0;
    for (std::size_t i = 0; i < a.v.size(); ++i) {
        Real t = (a.v[i] - b.v[i]).abs();
        if (t > m) m = t;
    }
    return m;
}

namespace {

// LU with partial pivoting; returns false if singular
bool lu(CMatrix& a, std::vector<std::size_t>& piv, int& sign) {
    std::size_t n = a.rows;
    piv.resize(n);
    sign = 1;
    for (std::size_t i = 0; i < n; ++i) piv[i] = i;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t best = c;
        Real bv = a(c, c).abs2();
        for (std::size_t r = c + 1; r < n; ++r) {
            Real t = a(r, c).abs2();
            if (t > bv) { bv = t; best = r; }
        }
        if (bv == 0) return false;
        if (best != c) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(c, j), a(best, j));
            std::swap(piv[c], piv[best]);
            sign = -sign;
        }
        for (std::size_t r = c + 1; r < n; ++r) {
            Cplx f = a(r, c) / a(c, c);
            a(r, c) = f;
            for (std::size_t j = c + 1; j < n; ++j) a(r, j) -= f * a(c, j);
        }
    }
    return true;
}

}  // namespace

Cplx det(const CMatrix& m) {
    if (m.rows == 0) return Cplx(1);
    CMatrix a = m;
    std::vector<std::size_t> piv;
    int sign;
    if (!lu(a, piv, sign)) return Cplx(0);
    Cplx d(sign);
    for (std::size_t i = 0; i < a.rows; ++i) d *= a(i, i);
    return d;
}

CMatrix inverse(const CMatrix& m) {
    std::size_t n = m.rows;
    CMatrix a = m;
    std::vector<std::size_t> piv;
    int sign;
    if (!lu(a, piv, sign)) throw std::domain_error("singular matrix");
    CMatrix inv(n, n);
    for (std::size_t col = 0; col < n; ++col) {
        std::vector<Cplx> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = piv[i] == col ? Cplx(1) : Cplx(0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < i; ++j) x[i] -= a(i, j) * x[j];
        for (std::size_t ii = n; ii-- > 0;) {
            for (std::size_t j = ii + 1; j < n; ++j) x[ii] -= a(ii, j) * x[j];
            x[ii] /= a(ii, ii);
        }
        for (std::size_t i = 0; i < n; ++i) inv(i, col) = x[i];
    }
    return inv;
}

CMatrix hermitian_sqrt(const CMatrix& y) {
    std::size_t n = y.rows;
    CMatrix Y = y, Z = CMatrix::identity(n);
    Real eps = boost::multiprecision::pow(Real(2), -static_cast<long>(Real::default_precision() * 3));
    for (int it = 0; it < 200; ++it) {
        CMatrix Yi = inverse(Y), Zi = inverse(Z);
        CMatrix Yn = (Y + Zi).scaled(Cplx(Real(0.5)));
        CMatrix Zn = (Z + Yi).scaled(Cplx(Real(0.5)));
        Real diff = max_abs_diff(Yn, Y);
        Y = std::move(Yn);
        Z = std::move(Zn);
        if (diff <= eps) break;
    }
    // symmetrize
    CMatrix s = (Y + Y.adjoint()).scaled(Cplx(Real(0.5)));
    return s;
}

namespace {

bool cholesky_ok(const CMatrix& y, const Real& shift) {
    std::size_t n = y.rows;
    CMatrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        Real s = y(j, j).re - shift;
        for (std::size_t k = 0; k < j; ++k) s -= l(j, k).abs2();
        if (s <= 0) return false;
        Real d = boost::multiprecision::sqrt(s);
        l(j, j) = Cplx(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            Cplx t = y(i, j);
            for (std::size_t k = 0; k < j; ++k) t -= l(i, k) * l(j, k).conj();
            l(i, j) = Cplx(t.re / d, t.im / d);
        }
    }
    return true;
}

Real frob(const CMatrix& y) {
    Real s = 0;
    for (auto& x : y.v) s += x.abs2();
    return boost::multiprecision::sqrt(s);
}

}  // namespace

bool is_positive_definite(const CMatrix& y) { return cholesky_ok(y, Real(0)); }

Real min_eigenvalue(const CMatrix& y) {
    // bisection on the shift; returns a lower bound accurate to ~1e-30 relative
    Real lo = -frob(y), hi = frob(y);
    for (int it = 0; it < 200; ++it) {
        Real mid = (lo + hi) / 2;
        if (cholesky_ok(y, mid)) lo = mid; else hi = mid;
    }
    return lo;
}

Real max_eigenvalue(const CMatrix& y) {
    CMatrix neg = y.scaled(Cplx(-1));
    Real lo = -frob(y), hi = frob(y);
    for (int it = 0; it < 200; ++it) {
        Real mid = (lo + hi) / 2;
        // -y - (-mid) PD  <=> mid*I - y PD  <=> mid > lambda_max
        if (cholesky_ok(neg, -mid)) hi = mid; else lo = mid;
    }
    return hi;
}

std::string to_string(const Real& x, int digits) {
    std::ostringstream os;
    os.precision(digits);
    os << x;
    return os.str();
}

double to_double(const Real& x) { return x.convert_to<double>(); }

}  // namespace hqm
