#include "hqm/qfield.hpp"

#include "hqm/numeric.hpp"

#include <ostream>
#include <sstream>
#include <stdexcept>

namespace hqm {

long omega_trace(long d) { return d % 4 == 3 ? 1 : 0; }

Rat omega_norm(long d) { return d % 4 == 3 ? Rat((d + 1) / 4) : Rat(d); }

FieldElem::FieldElem(long d, Rat a, Rat b) : a_(std::move(a)), b_(std::move(b)), d_(d) {
    a_.canonicalize();
    b_.canonicalize();
    if (d_ == 0 && sgn(b_) != 0) throw std::invalid_argument("irrational element without field");
}

void FieldElem::adopt(long od) {
    if (od == 0 || od == d_) return;
    if (d_ == 0) {
        d_ = od;
        return;
    }
    throw std::invalid_argument("field mismatch: d=" + std::to_string(d_) + " vs d=" + std::to_string(od));
}

FieldElem& FieldElem::operator+=(const FieldElem& o) {
    adopt(o.d_);
    a_ += o.a_;
    b_ += o.b_;
    return *this;
}

FieldElem& FieldElem::operator-=(const FieldElem& o) {
    adopt(o.d_);
    a_ -= o.a_;
    b_ -= o.b_;
    return *this;
}

FieldElem& FieldElem::operator*=(const FieldElem& o) {
    adopt(o.d_);
    if (sgn(b_) == 0 && sgn(o.b_) == 0) {
        a_ *= o.a_;
        return *this;
    }
    // omega^2 = t*omega - nrm
    Rat bd = b_ * o.b_;
    Rat na = a_ * o.a_ - bd * omega_norm(d_);
    Rat nb = a_ * o.b_ + b_ * o.a_ + bd * omega_trace(d_);
    a_ = std::move(na);
    b_ = std::move(nb);
    return *this;
}

FieldElem FieldElem::operator-() const {
    FieldElem r = *this;
    r.a_ = -r.a_;
    r.b_ = -r.b_;
    return r;
}

FieldElem FieldElem::conj() const {
    if (sgn(b_) == 0) return *this;
    FieldElem r = *this;
    r.a_ = a_ + b_ * omega_trace(d_);
    r.b_ = -b_;
    return r;
}

Rat FieldElem::norm() const {
    if (sgn(b_) == 0) return a_ * a_;
    return a_ * a_ + a_ * b_ * omega_trace(d_) + b_ * b_ * omega_norm(d_);
}

Rat FieldElem::trace() const { return 2 * a_ + b_ * omega_trace(d_); }

bool FieldElem::is_integral() const {
    return a_.get_den() == 1 && b_.get_den() == 1;
}

FieldElem FieldElem::inverse() const {
    if (is_zero()) throw std::domain_error("division by zero in field");
    Rat n = norm();
    FieldElem c = conj();
    c.a_ /= n;
    c.b_ /= n;
    return c;
}

std::string FieldElem::str() const {
    std::ostringstream os;
    os << *this;
    return os.str();
}

std::ostream& operator<<(std::ostream& os, const FieldElem& x) {
    if (x.is_rational()) return os << x.a();
    if (sgn(x.a()) != 0) os << x.a() << (sgn(x.b()) > 0 ? "+" : "");
    return os << x.b() << "*w";
}

bool is_squarefree(long d) {
    if (d <= 0) return false;
    for (long p = 2; p * p <= d; ++p)
        if (d % (p * p) == 0) return false;
    return true;
}

QuadField make_field(long d) {
    if (d <= 0) throw std::invalid_argument("d must be positive");
    if (!is_squarefree(d)) throw std::invalid_argument("d must be squarefree");
    QuadField k;
    k.d = d;
    k.omega_half = d % 4 == 3;
    k.disc = k.omega_half ? d : 4 * d;
    return k;
}

FieldElem QuadField::delta() const {
    // 2*omega = sqrt(-d) when omega = sqrt(-d); 2*omega - 1 = sqrt(-d) otherwise
    if (omega_half) return FieldElem(d, -1, 2);
    return FieldElem(d, 0, 2);
}

bool QuadField::class_number_one() const {
    for (long x : {1L, 2L, 3L, 7L, 11L, 19L, 43L, 67L, 163L})
        if (x == d) return true;
    return false;
}

std::vector<FieldElem> QuadField::units() const {
    std::vector<FieldElem> u{elem(1, 0), elem(-1, 0)};
    if (d == 1) {
        u.push_back(elem(0, 1));
        u.push_back(elem(0, -1));
    } else if (d == 3) {
        // omega = (1+sqrt(-3))/2 is a primitive 6th root of unity
        FieldElem w = omega(), p = w;
        for (int i = 0; i < 5; ++i) {
            if (p != elem(1, 0) && p != elem(-1, 0)) u.push_back(p);
            p *= w;
        }
    }
    return u;
}

Cplx embed(const FieldElem& x, const QuadField& k, unsigned precision_bits) {
    PrecisionGuard guard(precision_bits + 16);
    Real sq = boost::multiprecision::sqrt(Real(k.d));
    Real wr = k.omega_half ? Real(0.5) : Real(0);
    Real wi = k.omega_half ? sq / 2 : sq;
    Real a = to_real(x.a()), b = to_real(x.b());
    return {a + b * wr, b * wi};
}

}  // namespace hqm
