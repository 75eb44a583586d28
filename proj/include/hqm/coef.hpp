#pragma once

#include "hqm/qfield.hpp"

#include <iosfwd>
#include <string>

namespace hqm {

// Element u + v*i of k(i), u, v in k. When d = 1, i already lies in k and v is
// folded into u so the representation stays unique.
class Coef {
public:
    Coef() = default;
    Coef(long v) : u_(v) {}  // NOLINT(google-explicit-constructor)
    Coef(const Rat& v) : u_(v) {}  // NOLINT(google-explicit-constructor)
    Coef(const FieldElem& u) : u_(u) {}  // NOLINT(google-explicit-constructor)
    Coef(const FieldElem& u, const FieldElem& v);

    static Coef imag_unit(long d);

    const FieldElem& re_part() const { return u_; }   // k-component
    const FieldElem& i_part() const { return v_; }    // coefficient of i
    long d() const { return u_.d() ? u_.d() : v_.d(); }

    bool is_zero() const { return u_.is_zero() && v_.is_zero(); }
    bool in_k() const { return v_.is_zero(); }
    bool is_rational() const { return v_.is_zero() && u_.is_rational(); }

    // complex conjugation (the embedding has Im omega > 0, i -> -i)
    Coef conj() const;
    Coef inverse() const;

    Coef& operator+=(const Coef& o);
    Coef& operator-=(const Coef& o);
    Coef& operator*=(const Coef& o);
    Coef& operator/=(const Coef& o) { return *this *= o.inverse(); }
    friend Coef operator+(Coef x, const Coef& y) { return x += y; }
    friend Coef operator-(Coef x, const Coef& y) { return x -= y; }
    friend Coef operator*(Coef x, const Coef& y) { return x *= y; }
    friend Coef operator/(Coef x, const Coef& y) { return x /= y; }
    Coef operator-() const { return Coef(-u_, -v_); }

    friend bool operator==(const Coef& x, const Coef& y) { return x.u_ == y.u_ && x.v_ == y.v_; }
    friend bool operator!=(const Coef& x, const Coef& y) { return !(x == y); }
    friend bool operator<(const Coef& x, const Coef& y) {
        if (x.u_ != y.u_) return x.u_ < y.u_;
        return x.v_ < y.v_;
    }

    std::string str() const;

private:
    void normalize();

    FieldElem u_, v_;
};

std::ostream& operator<<(std::ostream& os, const Coef& x);
inline bool is_zero(const Coef& x) { return x.is_zero(); }

Cplx embed(const Coef& x, const QuadField& k, unsigned precision_bits);

}  // namespace hqm
