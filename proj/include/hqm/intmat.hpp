#pragma once

#include "hqm/matrix.hpp"
#include "hqm/qfield.hpp"

#include <optional>
#include <vector>

namespace hqm {

using IMatrix = Matrix<Int>;

struct HnfResult {
    IMatrix h;  // nonzero rows in echelon form, positive pivots, entries above pivots reduced
    IMatrix u;  // unimodular, u * a = [h; 0]
    std::size_t rank = 0;
    std::vector<std::size_t> pivots;
};

// Row-style Hermite normal form of the row lattice of a.
HnfResult hnf(const IMatrix& a);

// Invariant factors (nonzero diagonal of the Smith form, each dividing the next).
std::vector<Int> smith_invariants(const IMatrix& a);

Int int_det(const IMatrix& a);

// Integer solution x of x^T a = b^T (b in the row lattice of a), or nullopt.
std::optional<std::vector<Int>> solve_in_row_lattice(const IMatrix& a, const std::vector<Int>& b);

// Basis (rows) of the integer left kernel {x in Z^r : x^T a = 0}.
IMatrix left_kernel(const IMatrix& a);

Int lcm_den(const std::vector<Rat>& v);

}  // namespace hqm
