#pragma once

#include "hqm/coef.hpp"
#include "hqm/matrix.hpp"
#include "hqm/numeric.hpp"
#include "hqm/qfield.hpp"

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace hqm {

using Subset = std::vector<int>;  // sorted, 0-based

std::vector<Subset> combinations(int n, int k);
std::size_t binomial(std::size_t n, std::size_t k);
Rat factorial(long n);

// All spaces F_{n,g}, 0 <= g <= n, for one field and gram matrix, with the
// raising (multiplication by the form) and lowering (Laplacian) operators in
// the basis of minor products det(U_I) conj(det(U_J)).
class FFamily {
public:
    static std::shared_ptr<const FFamily> make(const QuadField& k, const Matrix<FieldElem>& gram);
    static std::shared_ptr<const FFamily> identity(const QuadField& k, int n);

    const QuadField& field() const { return k_; }
    int n() const { return n_; }
    const Matrix<FieldElem>& gram() const { return gram_; }
    std::size_t dim(int g) const;
    int weight(int g) const { return 2 * g - n_; }
    const std::vector<Subset>& subsets(int g) const { return subsets_.at(g); }
    std::size_t subset_index(int g, const Subset& s) const;
    std::size_t index(int g, std::size_t i, std::size_t j) const { return i * subsets_.at(g).size() + j; }
    std::pair<std::size_t, std::size_t> pair_of(int g, std::size_t b) const;

    const Matrix<Coef>& raise_matrix(int g) const { return raise_.at(g); }  // g -> g+1
    const Matrix<Coef>& lower_matrix(int g) const { return lower_.at(g); }  // g -> g-1

private:
    FFamily(const QuadField& k, const Matrix<FieldElem>& gram);

    QuadField k_;
    int n_ = 0;
    Matrix<FieldElem> gram_;
    std::vector<std::vector<Subset>> subsets_;
    std::vector<Matrix<Coef>> raise_, lower_;
};

using FamilyPtr = std::shared_ptr<const FFamily>;

class FPoly {
public:
    FPoly() = default;
    FPoly(FamilyPtr fam, int g);  // zero
    FPoly(FamilyPtr fam, int g, std::vector<Coef> c);
    static FPoly basis(FamilyPtr fam, int g, const Subset& i, const Subset& j);
    static FPoly one(FamilyPtr fam) { return basis(fam, 0, {}, {}); }

    const FamilyPtr& family() const { return fam_; }
    int genus() const { return g_; }
    int n() const { return fam_->n(); }
    const std::vector<Coef>& coeffs() const { return c_; }
    const Coef& coeff(const Subset& i, const Subset& j) const;
    void set(const Subset& i, const Subset& j, Coef v);
    bool is_zero() const;

    FPoly lower() const;
    FPoly raise() const;
    FPoly lower(int times) const;
    FPoly raise(int times) const;

    Coef evaluate(const std::vector<std::vector<FieldElem>>& tuple) const;  // g vectors of length n
    Coef evaluate(const std::vector<std::vector<Coef>>& tuple) const;
    Cplx evaluate(const std::vector<std::vector<Cplx>>& tuple, unsigned bits) const;

    FPoly& operator+=(const FPoly& o);
    FPoly& operator-=(const FPoly& o);
    FPoly& operator*=(const Coef& s);
    friend FPoly operator+(FPoly a, const FPoly& b) { return a += b; }
    friend FPoly operator-(FPoly a, const FPoly& b) { return a -= b; }
    friend FPoly operator*(FPoly a, const Coef& s) { return a *= s; }
    friend FPoly operator*(const Coef& s, FPoly a) { return a *= s; }
    friend bool operator==(const FPoly& a, const FPoly& b) { return a.g_ == b.g_ && a.c_ == b.c_; }
    friend bool operator!=(const FPoly& a, const FPoly& b) { return !(a == b); }

    std::string str() const;

private:
    void check_same(const FPoly& o) const;

    FamilyPtr fam_;
    int g_ = 0;
    std::vector<Coef> c_;
};

// Graded sl2 module: piece p has weight h[p]; E maps p -> p+1, F maps p -> p-1.
struct Sl2Module {
    std::vector<int> weight;
    std::vector<std::size_t> dims;
    std::vector<Matrix<Coef>> E;  // E[p]: dims[p+1] x dims[p]; last is 0 x dims
    std::vector<Matrix<Coef>> F;  // F[p]: dims[p-1] x dims[p]; F[0] is 0 x dims[0]

    std::size_t pieces() const { return dims.size(); }
    Matrix<Coef> e_power(std::size_t p, int j) const;  // E^j on piece p
    Matrix<Coef> f_power(std::size_t p, int j) const;  // F^j on piece p
};

Sl2Module fspace_module(const FamilyPtr& fam);

struct Sl2Report {
    bool pass = true;
    std::vector<std::string> failures;  // "relation@piece:basis"
};
Sl2Report check_sl2(const Sl2Module& mod);
Sl2Report sl2_check(const QuadField& k, const Matrix<FieldElem>& gram);

// coefficient of E^j F^j in the projector onto the pi_{m+2i} component
Rat projector_coefficient(int m, int i, int j);
Matrix<Coef> isotypic_projector(const Sl2Module& mod, std::size_t piece, int k);

struct LefschetzPart {
    int ell;
    FPoly q;  // primitive, in F_{n,ell}
};
std::vector<LefschetzPart> lefschetz_decompose(const FPoly& p);
FPoly lefschetz_reassemble(const std::vector<LefschetzPart>& parts, int g);

struct LaplacianTerm {
    int r;
    FPoly p;  // Delta^r P t^r / r!
};
std::vector<LaplacianTerm> exp_laplacian(const FPoly& p, const Rat& t);

// basis of the primitive subspace ker(Delta) in F_{n,g}, as polys
std::vector<FPoly> primitive_basis(const FamilyPtr& fam, int g);

}  // namespace hqm
