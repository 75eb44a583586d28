#pragma once

#include "hqm/coef.hpp"
#include "hqm/fpoly.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

namespace hqm {

using Mask = std::uint32_t;
using MonoKey = std::pair<Mask, Mask>;  // dz_I wedge dzbar_J, I and J as bitmasks

int popcount(Mask m);
Subset mask_to_subset(Mask m);
Mask subset_to_mask(const Subset& s);

struct LefschetzModule {
    Sl2Module mod;
    std::vector<int> degree;                  // total degree of each piece
    std::vector<std::vector<MonoKey>> basis;  // monomial basis of each piece
};

class CohClass;

// Cohomology of E^n, E = C/O_k, with the diagonal Hermitian form diag(a).
class CohRing : public std::enable_shared_from_this<CohRing> {
public:
    static std::shared_ptr<const CohRing> make(const QuadField& k, std::vector<long> a);

    const QuadField& field() const { return k_; }
    int n() const { return static_cast<int>(a_.size()); }
    const std::vector<long>& a() const { return a_; }
    // i / sqrt(d_k) = -1/delta, an element of k
    const FieldElem& c() const { return c_; }
    const FamilyPtr& family() const { return fam_; }  // F_{n,*} with gram diag(a)

    std::vector<MonoKey> bidegree_basis(int p, int q) const;
    std::vector<MonoKey> degree_basis(int t) const;
    // even (parity 0) or odd (parity 1) Lefschetz chain; built once
    const LefschetzModule& lefschetz(int parity) const;

private:
    CohRing(const QuadField& k, std::vector<long> a);

    QuadField k_;
    std::vector<long> a_;
    FieldElem c_;
    FamilyPtr fam_;
    mutable std::once_flag once_[2];
    mutable LefschetzModule lm_[2];
};

using RingPtr = std::shared_ptr<const CohRing>;

class CohClass {
public:
    CohClass() = default;
    explicit CohClass(RingPtr r) : ring_(std::move(r)) {}

    const RingPtr& ring() const { return ring_; }
    const std::map<MonoKey, Coef>& terms() const { return terms_; }
    Coef coeff(Mask i, Mask j) const;
    void add_term(Mask i, Mask j, const Coef& c);

    bool is_zero() const { return terms_.empty(); }
    std::optional<std::pair<int, int>> bidegree() const;  // nullopt if zero or inhomogeneous
    // semilinear involution: conjugate coefficients and swap dz <-> dzbar
    CohClass involution() const;
    bool is_rational() const { return involution() == *this; }
    Coef integrate() const;

    std::vector<Coef> to_vector(const std::vector<MonoKey>& basis) const;
    static CohClass from_vector(RingPtr r, const std::vector<MonoKey>& basis, const std::vector<Coef>& v);

    CohClass& operator+=(const CohClass& o);
    CohClass& operator-=(const CohClass& o);
    CohClass& operator*=(const Coef& s);
    friend CohClass operator+(CohClass a, const CohClass& b) { return a += b; }
    friend CohClass operator-(CohClass a, const CohClass& b) { return a -= b; }
    friend CohClass operator*(CohClass a, const Coef& s) { return a *= s; }
    friend CohClass operator*(const Coef& s, CohClass a) { return a *= s; }
    CohClass operator-() const { return *this * Coef(-1); }
    friend bool operator==(const CohClass& a, const CohClass& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const CohClass& a, const CohClass& b) { return !(a == b); }

private:
    RingPtr ring_;
    std::map<MonoKey, Coef> terms_;
};

CohClass wedge(const CohClass& x, const CohClass& y);
CohClass wedge_all(const RingPtr& r, const std::vector<CohClass>& xs);
CohClass power(const CohClass& x, int e);
CohClass one_class(const RingPtr& r);
CohClass volume_class(const RingPtr& r);  // prod_l c dz_l dzbar_l, integral 1

CohClass f_quad(const RingPtr& r, const std::vector<Coef>& lambda);
CohClass f_sesq(const RingPtr& r, const std::vector<Coef>& lambda, const std::vector<Coef>& mu);
CohClass class_Y(const RingPtr& r, int l);
CohClass class_Yplus(const RingPtr& r, int l, int j);
CohClass class_Yminus(const RingPtr& r, int l, int j);
CohClass class_D(const RingPtr& r);

// coefficients (x_l, p_lj, m_lj) with f(lambda) = sum x Y_l + sum p Y+_lj + sum m Y-_lj
struct YDecomposition {
    std::vector<FieldElem> y;                        // |lambda_l|^2
    std::map<std::pair<int, int>, FieldElem> plus;   // -Re(lambda_l conj lambda_j)
    std::map<std::pair<int, int>, FieldElem> minus;  // Im(lambda_l conj lambda_j) / sqrt(d_k)
};
YDecomposition y_decomposition(const RingPtr& r, const std::vector<FieldElem>& lambda);
CohClass from_y_decomposition(const RingPtr& r, const YDecomposition& yd);

// Lefschetz operators on the full cohomology
CohClass apply_E(const CohClass& x);
CohClass apply_F(const CohClass& x);

std::vector<CohClass> rational_hodge_basis(const RingPtr& r, int l);
std::vector<CohClass> primitive_hodge_basis(const RingPtr& r, int l);

}  // namespace hqm
