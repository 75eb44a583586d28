#include "hqm/coef.hpp"

#include "hqm/numeric.hpp"

#include <ostream>
#include <sstream>
#include <stdexcept>

namespace hqm {

Coef::Coef(const FieldElem& u, const FieldElem& v) : u_(u), v_(v) { normalize(); }

Coef Coef::imag_unit(long d) {
    if (d == 1) return Coef(FieldElem(1, 0, 1));
    return Coef(FieldElem(d, 0, 0), FieldElem(d, 1, 0));
}

void Coef::normalize() {
    long dd = d();
    if (dd == 1 && !v_.is_zero()) {
        u_ += v_ * FieldElem(1, 0, 1);
        v_ = FieldElem();
    }
}

Coef Coef::conj() const { return Coef(u_.conj(), -v_.conj()); }

Coef Coef::inverse() const {
    if (is_zero()) throw std::domain_error("division by zero in k(i)");
    if (v_.is_zero()) return Coef(u_.inverse());
    // (u + v i)^{-1} = (u - v i)/(u^2 + v^2); u^2+v^2 != 0 since i is not in k
    FieldElem n = u_ * u_ + v_ * v_;
    FieldElem ni = n.inverse();
    return Coef(u_ * ni, -v_ * ni);
}

Coef& Coef::operator+=(const Coef& o) {
    u_ += o.u_;
    v_ += o.v_;
    normalize();
    return *this;
}

Coef& Coef::operator-=(const Coef& o) {
    u_ -= o.u_;
    v_ -= o.v_;
    normalize();
    return *this;
}

Coef& Coef::operator*=(const Coef& o) {
    if (v_.is_zero() && o.v_.is_zero()) {
        u_ *= o.u_;
        normalize();
        return *this;
    }
    FieldElem nu = u_ * o.u_ - v_ * o.v_;
    FieldElem nv = u_ * o.v_ + v_ * o.u_;
    u_ = std::move(nu);
    v_ = std::move(nv);
    normalize();
    return *this;
}

std::string Coef::str() const {
    std::ostringstream os;
    os << *this;
    return os.str();
}

std::ostream& operator<<(std::ostream& os, const Coef& x) {
    if (x.in_k()) return os << x.re_part();
    return os << "(" << x.re_part() << ")+(" << x.i_part() << ")*i";
}

Cplx embed(const Coef& x, const QuadField& k, unsigned precision_bits) {
    Cplx u = embed(x.re_part(), k, precision_bits);
    if (x.in_k()) return u;
    Cplx v = embed(x.i_part(), k, precision_bits);
    return u + v * Cplx(Real(0), Real(1));
}

}  // namespace hqm
