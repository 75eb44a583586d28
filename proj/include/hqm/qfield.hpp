#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace hqm {

using Rat = mpq_class;
using Int = mpz_class;

struct Cplx;

// Element a + b*omega of k = Q(sqrt(-d)). d == 0 marks a plain rational that
// adopts the field of whatever it is combined with.
class FieldElem {
public:
    FieldElem() = default;
    FieldElem(long v) : a_(v) {}  // NOLINT(google-explicit-constructor)
    FieldElem(const Rat& v) : a_(v) {}  // NOLINT(google-explicit-constructor)
    FieldElem(long d, Rat a, Rat b);

    const Rat& a() const { return a_; }
    const Rat& b() const { return b_; }
    long d() const { return d_; }

    bool is_zero() const { return sgn(a_) == 0 && sgn(b_) == 0; }
    bool is_rational() const { return sgn(b_) == 0; }

    FieldElem conj() const;
    Rat norm() const;
    Rat trace() const;
    bool is_integral() const;
    FieldElem inverse() const;

    FieldElem& operator+=(const FieldElem& o);
    FieldElem& operator-=(const FieldElem& o);
    FieldElem& operator*=(const FieldElem& o);
    FieldElem& operator/=(const FieldElem& o) { return *this *= o.inverse(); }

    friend FieldElem operator+(FieldElem x, const FieldElem& y) { return x += y; }
    friend FieldElem operator-(FieldElem x, const FieldElem& y) { return x -= y; }
    friend FieldElem operator*(FieldElem x, const FieldElem& y) { return x *= y; }
    friend FieldElem operator/(FieldElem x, const FieldElem& y) { return x /= y; }
    FieldElem operator-() const;

    friend bool operator==(const FieldElem& x, const FieldElem& y) {
        return x.a_ == y.a_ && x.b_ == y.b_;
    }
    friend bool operator!=(const FieldElem& x, const FieldElem& y) { return !(x == y); }
    // total order on coordinates, used only for canonical sorting
    friend bool operator<(const FieldElem& x, const FieldElem& y) {
        if (x.a_ != y.a_) return x.a_ < y.a_;
        return x.b_ < y.b_;
    }

    std::string str() const;

private:
    void adopt(long od);

    Rat a_{0}, b_{0};
    long d_ = 0;
};

std::ostream& operator<<(std::ostream& os, const FieldElem& x);

inline bool is_zero(const FieldElem& x) { return x.is_zero(); }

// trace(omega) and norm(omega)
long omega_trace(long d);
Rat omega_norm(long d);

struct QuadField {
    long d = 1;
    long disc = 4;          // d_k
    bool omega_half = false; // omega = (1+sqrt(-d))/2
    FieldElem omega() const { return FieldElem(d, 0, 1); }
    FieldElem one() const { return FieldElem(d, 1, 0); }
    FieldElem delta() const;  // sqrt(-d_k), positive imaginary part
    FieldElem elem(const Rat& a, const Rat& b) const { return FieldElem(d, a, b); }
    bool class_number_one() const;
    int unit_count() const { return d == 1 ? 4 : (d == 3 ? 6 : 2); }
    // all units of O_k
    std::vector<FieldElem> units() const;
};

bool is_squarefree(long d);
QuadField make_field(long d);

Cplx embed(const FieldElem& x, const QuadField& k, unsigned precision_bits);

}  // namespace hqm
