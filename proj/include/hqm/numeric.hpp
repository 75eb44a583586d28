#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <gmpxx.h>

#include <string>
#include <vector>

namespace hqm {

using Real = boost::multiprecision::mpfr_float;

// Sets the working precision (in bits) for Real values created in scope.
class PrecisionGuard {
public:
    explicit PrecisionGuard(unsigned bits);
    ~PrecisionGuard();
    PrecisionGuard(const PrecisionGuard&) = delete;
    PrecisionGuard& operator=(const PrecisionGuard&) = delete;

private:
    unsigned saved_;
};

unsigned digits10_for_bits(unsigned bits);
Real real_pi();
Real to_real(const mpq_class& q);
Real to_real(const mpz_class& z);

struct Cplx {
    Real re{0};
    Real im{0};

    Cplx() = default;
    Cplx(Real r) : re(std::move(r)), im(0) {}  // NOLINT(google-explicit-constructor)
    Cplx(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
    Cplx(int r) : re(r), im(0) {}  // NOLINT(google-explicit-constructor)

    Cplx conj() const { return {re, -im}; }
    Real abs2() const { return re * re + im * im; }
    Real abs() const;

    Cplx& operator+=(const Cplx& o) { re += o.re; im += o.im; return *this; }
    Cplx& operator-=(const Cplx& o) { re -= o.re; im -= o.im; return *this; }
    Cplx& operator*=(const Cplx& o);
    Cplx& operator/=(const Cplx& o);
    friend Cplx operator+(Cplx a, const Cplx& b) { return a += b; }
    friend Cplx operator-(Cplx a, const Cplx& b) { return a -= b; }
    friend Cplx operator*(Cplx a, const Cplx& b) { return a *= b; }
    friend Cplx operator/(Cplx a, const Cplx& b) { return a /= b; }
    Cplx operator-() const { return {-re, -im}; }
};

// e(x) = exp(2 pi i x)
Cplx expi2pi(const Real& x);
Cplx expi2pi(const mpq_class& x);
Cplx cexp(const Cplx& z);
Cplx cpow_int(Cplx z, long e);
Cplx csqrt(const Cplx& z);

// dense complex matrices, row major
struct CMatrix {
    std::size_t rows = 0, cols = 0;
    std::vector<Cplx> v;

    CMatrix() = default;
    CMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), v(r * c) {}
    static CMatrix identity(std::size_t n);

    Cplx& operator()(std::size_t i, std::size_t j) { return v[i * cols + j]; }
    const Cplx& operator()(std::size_t i, std::size_t j) const { return v[i * cols + j]; }

    CMatrix adjoint() const;
    friend CMatrix operator*(const CMatrix& a, const CMatrix& b);
    friend CMatrix operator+(const CMatrix& a, const CMatrix& b);
    friend CMatrix operator-(const CMatrix& a, const CMatrix& b);
    CMatrix scaled(const Cplx& s) const;
    std::vector<Cplx> apply(const std::vector<Cplx>& x) const;
};

// copy with every entry raised to the current default precision
CMatrix with_precision(const CMatrix& a);
Real max_abs_diff(const CMatrix& a, const CMatrix& b);
Cplx det(const CMatrix& a);
CMatrix inverse(const CMatrix& a);
// Hermitian positive definite square root (Denman-Beavers iteration)
CMatrix hermitian_sqrt(const CMatrix& y);
// smallest / largest eigenvalue bound of a Hermitian PD matrix via Cholesky-based bisection
Real min_eigenvalue(const CMatrix& y);
Real max_eigenvalue(const CMatrix& y);
bool is_positive_definite(const CMatrix& y);

std::string to_string(const Real& x, int digits = 20);
double to_double(const Real& x);

}  // namespace hqm
