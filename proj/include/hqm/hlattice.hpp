#pragma once

#include "hqm/intmat.hpp"
#include "hqm/matrix.hpp"
#include "hqm/qfield.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace hqm {

using Vec = std::vector<FieldElem>;

enum class Definiteness { positive, lorentzian, other };

class HermLattice {
public:
    HermLattice() = default;
    // Validates: Hermitian gram, integral trace form, nondegenerate.
    HermLattice(QuadField k, Matrix<FieldElem> gram);

    const QuadField& field() const { return k_; }
    std::size_t rank() const { return n_; }
    const Matrix<FieldElem>& gram() const { return gram_; }
    Definiteness definiteness() const { return def_; }
    int pos_index() const { return p_; }   // signature (p, q) of h
    int neg_index() const { return q_; }

    FieldElem h(const Vec& x, const Vec& y) const;  // x^T G conj(y)

    // Rank-2n trace lattice: basis e_1, w e_1, e_2, w e_2, ...
    const IMatrix& trace_gram() const { return s_; }
    const Matrix<Rat>& trace_gram_inv() const { return sinv_; }
    const Int& trace_det() const { return det_; }  // |det S| = [L^dual : L]

    Vec from_trace(const std::vector<Rat>& x) const;
    std::vector<Rat> to_trace(const Vec& v) const;
    // dual coordinates z (lambda = S^{-1} z in trace coordinates)
    Vec from_dual(const std::vector<long>& z) const;
    std::optional<std::vector<Int>> to_dual(const Vec& v) const;  // nullopt if v not in dual

    bool in_lattice(const Vec& v) const;
    bool in_dual(const Vec& v) const;

private:
    QuadField k_;
    std::size_t n_ = 0;
    Matrix<FieldElem> gram_;
    Definiteness def_ = Definiteness::other;
    int p_ = 0, q_ = 0;
    IMatrix s_;
    Matrix<Rat> sinv_;
    Int det_;
};

HermLattice diagonal_lattice(const QuadField& k, const std::vector<long>& a);

struct DualLattice {
    Matrix<FieldElem> basis;  // columns: an O_k-basis of L^dual in L-coordinates
};
DualLattice dual_basis(const HermLattice& L);

class DiscGroup {
public:
    DiscGroup() = default;
    explicit DiscGroup(const HermLattice& L);

    std::size_t order() const { return order_; }
    const std::vector<Int>& invariant_factors() const { return inv_; }
    // canonical reduced dual coordinates of coset i
    std::vector<long> rep(std::size_t i) const;
    Vec rep_vector(std::size_t i) const;
    std::size_t index_of_dual(const std::vector<long>& z) const;
    std::size_t index_of(const Vec& v) const;  // throws if v not in the dual
    // h(nu, nu) mod 1 and Tr h(nu, mu) mod 1
    Rat qnorm(std::size_t i) const;
    Rat bilinear(std::size_t i, std::size_t j) const;
    std::size_t negate(std::size_t i) const;
    std::size_t add(std::size_t i, std::size_t j) const;
    const HermLattice& lattice() const { return L_; }

private:
    void reduce(std::vector<Int>& z) const;

    HermLattice L_;
    IMatrix hnf_;
    std::vector<long> box_;
    std::size_t order_ = 1;
    std::vector<Int> inv_;
};

enum class Region { dual, lattice };

struct LatticeVector {
    std::vector<long> z;  // dual coordinates
    Vec x;                // coordinates in the basis of L
    Rat norm;             // h(x, x)
    std::size_t coset = 0;
};

struct EnumOptions {
    Region region = Region::dual;
    unsigned workers = 1;
};

// All lambda with h(lambda, lambda) <= bound, ordered lexicographically on z.
std::vector<LatticeVector> enumerate_vectors(const HermLattice& L, const DiscGroup& D, const Rat& bound,
                                             const EnumOptions& opt = {});
std::vector<LatticeVector> enumerate_vectors(const HermLattice& L, const Rat& bound, const EnumOptions& opt = {});

// Integer form of the pairing: h(x, y) = (X^T Ha Y + w X^T Hb Y) / scale, with X = D z-scaled coords.
class PairingTable {
public:
    PairingTable() = default;
    explicit PairingTable(const HermLattice& L);
    // scaled integer trace coordinates of a dual vector
    std::vector<std::int64_t> scaled(const std::vector<long>& z) const;
    std::pair<__int128, __int128> pair(const std::vector<std::int64_t>& X, const std::vector<std::int64_t>& Y) const;
    FieldElem value(const std::pair<__int128, __int128>& p) const;
    const Int& scale() const { return scale_; }

private:
    long d_ = 1;
    std::size_t m_ = 0;
    std::vector<std::int64_t> adj_;  // det * S^{-1}, row major
    std::vector<std::int64_t> ha_, hb_;
    Int scale_;
};

// g-tuples in (L^dual)^g with Gram matrix N; validation per GramTarget rules.
std::vector<std::vector<LatticeVector>> enumerate_tuples(const HermLattice& L, const DiscGroup& D,
                                                         const Matrix<FieldElem>& N,
                                                         const std::optional<std::vector<std::size_t>>& cosets = {},
                                                         const EnumOptions& opt = {});

// Hermitian g x g Gram matrix of a tuple
Matrix<FieldElem> gram_of(const HermLattice& L, const std::vector<Vec>& tuple);

// exact test of positive semidefiniteness for a Hermitian matrix over k
bool is_hermitian(const Matrix<FieldElem>& m);
bool is_psd(const Matrix<FieldElem>& m);
bool in_inverse_different(const QuadField& k, const FieldElem& x);

}  // namespace hqm
