#pragma once

#include "hqm/cycles.hpp"
#include "hqm/hlattice.hpp"

#include <optional>
#include <vector>

namespace hqm {

// O_k arithmetic for class number one fields
namespace ok {
// (g, x, y) with g = x a + y b generating the ideal (a, b); a, b integral
struct Bezout {
    FieldElem g, x, y;
};
Bezout bezout(const QuadField& k, const FieldElem& a, const FieldElem& b);
// the ideal generated by the entries is O_k (entries integral)
bool is_primitive(const QuadField& k, const Vec& v);
// unimodular U with v^T U = (g, 0, ..., 0)
Matrix<FieldElem> reduce_row(const QuadField& k, const Vec& v, FieldElem* gcd = nullptr);
}  // namespace ok

HermLattice hyperbolic_sum(const QuadField& k, const Matrix<FieldElem>& m);  // H(delta) + M

struct BoundaryData {
    HermLattice L;
    Vec e;
    HermLattice M;
    // columns: u (h(u, e) = g), e, then a basis of J^perp that maps to the basis of M
    Matrix<FieldElem> basis, basis_inv;
    FieldElem content;  // generator g of h(L, e)
    Rat rJ;
    DiscGroup DL, DM;
    std::vector<std::size_t> HJ;  // sorted coset indices

    // M coordinates of x in J^perp (tensor Q), throws otherwise
    Vec project(const Vec& x) const;
    bool orthogonal_to_HJ(std::size_t nu) const;
};

std::vector<Vec> find_isotropic(const HermLattice& L, long bound);
std::pair<HermLattice, Matrix<FieldElem>> quotient_lattice(const HermLattice& L, const Vec& e);
Rat compute_rJ(const HermLattice& L, const Vec& e);
BoundaryData analyze_boundary(const HermLattice& L, const Vec& e);

std::optional<std::size_t> arrow_up(const BoundaryData& bd, std::size_t nu);
std::optional<std::size_t> arrow_up_lift(const BoundaryData& bd, const Vec& lambda);  // lambda in L^dual

struct CorrectionTerm {
    int ell = 0;
    int index = 0;
    int lefschetz_power = 0;  // g - ell - 1
    Coef coefficient;
    CohClass w;
};
struct Correction {
    bool supported = false;
    std::vector<std::size_t> arrow;  // cosets of M
    std::size_t tuples = 0;
    std::vector<CorrectionTerm> terms;
};
// c_{l,i} = (r_J / d_k) sum over tuples of M^dual in the arrow image with Gram N of (Lambda^{g-l} P^l_i)
Correction assemble_correction(const BoundaryData& bd, int g, const std::vector<std::size_t>& cosets,
                               const Matrix<FieldElem>& N, unsigned workers = 1);

}  // namespace hqm
