#pragma once

#include "hqm/hlattice.hpp"
#include "hqm/numeric.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hqm {

// full: n(B) phase e(Tr(h(nu)B)) and w kernel e(-Tr h(nu, mu)), with h(nu) the
// Gram matrix itself. half: both exponents carry an extra factor 1/2.
enum class WeilConvention { full, half };

const char* convention_name(WeilConvention c);

struct GroupGen {
    enum class Kind { m, n, w };
    Kind kind = Kind::w;
    Matrix<FieldElem> mat;  // A for m, B for n, unused for w

    static GroupGen m_gen(Matrix<FieldElem> a) { return {Kind::m, std::move(a)}; }
    static GroupGen n_gen(Matrix<FieldElem> b) { return {Kind::n, std::move(b)}; }
    static GroupGen w_gen() { return {Kind::w, {}}; }
};

class WeilRep {
public:
    WeilRep(const HermLattice& L, std::size_t g, WeilConvention conv = WeilConvention::full);

    const HermLattice& lattice() const { return L_; }
    const DiscGroup& disc() const { return D_; }
    std::size_t genus() const { return g_; }
    std::size_t dim() const { return dim_; }
    WeilConvention convention() const { return conv_; }

    // basis element i <-> g-tuple of coset indices, lexicographic
    std::vector<std::size_t> tuple(std::size_t i) const;
    std::size_t index(const std::vector<std::size_t>& t) const;

    // exact Tr_{k/Q} h(rep_i, rep_j), not reduced
    const Rat& trace_pairing(std::size_t i, std::size_t j) const { return tr_[i * D_.order() + j]; }

private:
    HermLattice L_;
    DiscGroup D_;
    std::size_t g_;
    std::size_t dim_;
    WeilConvention conv_;
    std::vector<Rat> tr_;
};

// column j of the matrix is scalar[j] * e_{perm[j]}
struct MonomialMatrix {
    std::vector<std::size_t> perm;
    std::vector<FieldElem> scalar;

    MonomialMatrix operator*(const MonomialMatrix& o) const;
    bool is_identity() const;
    CMatrix to_dense(const QuadField& k, unsigned bits) const;
};

// det(A)^{-e} e_{nu A^{-1}}; e defaults to p + q
MonomialMatrix rho_m(const WeilRep& rep, const Matrix<FieldElem>& a, std::optional<long> exponent = {});
// diagonal phases, exact rationals in [0, 1)
std::vector<Rat> rho_n(const WeilRep& rep, const Matrix<FieldElem>& b);
CMatrix phases_to_diag(const std::vector<Rat>& ph, unsigned bits);

struct WeilIndex {
    Cplx value;           // genus-g index
    Cplx genus1;
    int eighth = -1;      // genus1 = e(eighth / 8), -1 if not a root of unity
    std::string branch;
};
WeilIndex weil_index(const WeilRep& rep, unsigned bits);

CMatrix rho_w(const WeilRep& rep, unsigned bits);
CMatrix rho_gen(const WeilRep& rep, const GroupGen& gen, unsigned bits);
CMatrix rho_word(const WeilRep& rep, const std::vector<GroupGen>& gens, unsigned bits);

}  // namespace hqm
