#pragma once

#include "hqm/fpoly.hpp"
#include "hqm/torcoh.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace hqm {

using FTuple = std::vector<std::vector<FieldElem>>;  // g vectors of length n

// A class-valued polynomial: each monomial dz_I dzbar_J of bidegree (g, g)
// carries an FPoly in F_{n,g} (gram diag(a)).
struct CycleClassFn {
    RingPtr ring;
    int g = 0;
    std::map<MonoKey, FPoly> data;

    CohClass evaluate(const FTuple& t) const;
    // lambda |-> integral of (this(lambda) wedge alpha)
    FPoly pair(const CohClass& alpha) const;
    CycleClassFn lower() const;  // coefficientwise Laplacian, genus g-1
    CycleClassFn& operator-=(const CycleClassFn& o);
    bool operator==(const CycleClassFn& o) const;
};

CycleClassFn cycle_class_fn(const RingPtr& r, int g);
CohClass cycle_class(const RingPtr& r, const FTuple& t);
CohClass gram_det_class(const RingPtr& r, const FTuple& t);
FPoly u_map(const RingPtr& r, int g, const CohClass& alpha);
// (sum of the g column Laplacians)^g applied to the polynomial-valued f^g = g! Z; a class in H^{g,g}
CohClass full_laplacian_power(const RingPtr& r, int g);

struct DecompEntry {
    int ell = 0;
    int index = 0;
    CohClass w;      // primitive rational class in H^{ell,ell}
    FPoly p_top;     // primitive, F_{n,ell}
    FPoly p_raised;  // Lambda^{g-ell} p_top, F_{n,g}
};

struct DecompositionTable {
    RingPtr ring;
    int g = 0;
    std::vector<DecompEntry> entries;

    CycleClassFn reassemble() const;
    CohClass component(const DecompEntry& e) const;  // W wedge D^{g-ell}
};

DecompositionTable decompose_cycle_function(const RingPtr& r, int g);

CycleClassFn corrected_fn(const RingPtr& r, int g);
CohClass corrected_class(const RingPtr& r, const FTuple& t);
CohClass corrected_class_codim1(const RingPtr& r, const std::vector<FieldElem>& lambda);

struct AdjointReport {
    bool pass = true;
    int checked = 0;
    std::vector<std::string> mismatches;
};
// F(Z(l_1..l_{g+1})) = sum_{k,l} h(l_k, l_l) (-1)^{k+l} wedge_p f(([l]_k)_p, ([l]_l)_p)
// at random exact tuples, plus raise(u(alpha)) = u(F alpha) and lower(u(alpha)) = u(alpha D)
// on the monomial basis of H^{n-g,n-g}.
AdjointReport delta_adjoint_check(const RingPtr& r, int g, int samples = 10, std::uint32_t seed = 1);

FieldElem herm_diag(const RingPtr& r, const std::vector<FieldElem>& x, const std::vector<FieldElem>& y);

}  // namespace hqm
