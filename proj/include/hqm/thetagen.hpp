#pragma once

#include "hqm/cycles.hpp"
#include "hqm/fpoly.hpp"
#include "hqm/hlattice.hpp"
#include "hqm/numeric.hpp"
#include "hqm/torcoh.hpp"
#include "hqm/weilrep.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace hqm {

// Exact sums over g-tuples of L^dual grouped by (coset tuple, Gram matrix N),
// truncated at Tr N <= T. For each cell and each 0 <= m <= g the cell keeps
// sum det(U_{I,S}) conj det(U_{K,T}) over its tuples (U the n x g coordinate
// matrix, |I| = |K| = |S| = |T| = m), which is enough to evaluate any weight
// in F_{n,m} and its completions.
class ThetaData {
public:
    struct Cell {
        std::vector<std::size_t> cosets;
        std::size_t component = 0;
        Matrix<FieldElem> N;
        Rat trace;
        std::size_t count = 0;
        std::vector<std::vector<std::pair<std::int64_t, std::int64_t>>> moments;  // per m, scaled Z[w]
        std::vector<std::uint32_t> tuples;  // flat, g vector indices per tuple
    };

    ThetaData(const HermLattice& L, int g, const Rat& T, unsigned workers = 1);

    const HermLattice& lattice() const { return L_; }
    const WeilRep& rep() const { return rep_; }
    int genus() const { return g_; }
    const Rat& truncation() const { return T_; }
    const std::vector<LatticeVector>& vectors() const { return vecs_; }
    const std::vector<Cell>& cells() const { return cells_; }
    std::size_t tuple_count() const { return ntuples_; }
    const Int& exponent() const { return den_; }  // coordinates are scaled by this
    std::vector<std::vector<FieldElem>> tuple(const Cell& c, std::size_t t) const;

    // minimal nonzero h on the dual lattice and minimal eigenvalue of the gram (lower bounds)
    const Rat& min_dual_norm() const { return mu_; }
    double min_gram_eigen() const { return gmin_; }

    // exact value of sum_{tuples in cell} P(tuple) for P in F_{n,m}, m <= g, summed over m-column minors
    Coef moment_value(const Cell& c, const FPoly& P, std::size_t S, std::size_t T) const;
    Coef holomorphic_value(const Cell& c, const FPoly& P) const;

private:
    HermLattice L_;
    WeilRep rep_;
    int g_;
    Rat T_;
    std::vector<LatticeVector> vecs_;
    std::vector<Cell> cells_;
    std::size_t ntuples_ = 0;
    Int den_;
    Rat mu_;
    double gmin_ = 0;
};

// numeric g x g data derived from tau
struct TauData {
    CMatrix tau, Y;
    Real detY, ymin;
    std::vector<CMatrix> minors;  // minors[m](S, T) = det Y_{S,T}
};
TauData tau_data(const CMatrix& tau);

struct Channel {
    std::string label;
    FPoly poly;
};

struct SeriesSpec {
    enum class Kind { cycles, corrected, weighted, completed };
    Kind kind = Kind::weighted;
    HermLattice lattice;
    int g = 1;
    std::optional<FPoly> poly;     // weighted / completed
    bool test_classes = false;     // cycles / corrected: pair with the rational basis of H^{n-g,n-g}
};

const char* kind_name(SeriesSpec::Kind k);
SeriesSpec::Kind kind_from_name(const std::string& s);
RingPtr ring_for(const HermLattice& L);  // diagonal lattices only
std::vector<Channel> series_channels(const SeriesSpec& spec);
bool uses_completion(const SeriesSpec& spec);

struct SeriesValues {
    std::vector<std::vector<Cplx>> values;  // [channel][component]
    Real tail;                              // bound on the truncation error of every entry
};

SeriesValues eval_series(const ThetaData& td, const std::vector<Channel>& ch, const CMatrix& tau, bool completed,
                         unsigned bits);
Real tail_bound(const ThetaData& td, const std::vector<Channel>& ch, const TauData& t, bool completed);

// det(Y)^{-1} sum exp(-Delta/4pi)(P)(lambda Y^{1/2}) q^N, per coset tuple
SeriesValues eval_completed(const ThetaData& td, const FPoly& P, const CMatrix& tau, unsigned bits);

using NumClass = std::map<MonoKey, Cplx>;
// non-holomorphic part of the completed cycle series for one cell, evaluated through
// the minors of the matrix of classes [f(lambda_i, lambda_j)]
NumClass eval_phi_completion(const RingPtr& ring, const ThetaData& td, const TauData& t, const ThetaData::Cell& c,
                             unsigned bits);
// phi for every component, summed against q^N: [monomial channel][component]
SeriesValues eval_phi_series(const RingPtr& ring, const ThetaData& td, const CMatrix& tau, unsigned bits);

struct QCoef {
    std::vector<std::size_t> cosets;
    Matrix<FieldElem> N;
    Rat trace;
    std::variant<Coef, CohClass, std::vector<Coef>> value;
};
struct QExpansion {
    long d = 1;
    Matrix<FieldElem> gram;
    int g = 1;
    int weight = 0;
    Rat T;
    std::string kind;
    std::vector<std::string> labels;  // test class labels when value is a vector
    std::vector<QCoef> coefficients;
};
QExpansion qexp(const SeriesSpec& spec, const Rat& T, unsigned workers = 1);
QExpansion qexp(const SeriesSpec& spec, const ThetaData& td);
// exact checks: support realized by enumeration, e(Tr((N - h(nu))B)) = 1 for integral Hermitian B
bool check_n_compatibility(const QExpansion& q, const HermLattice& L);

struct ModularityReport {
    std::string generator;
    CMatrix tau;
    Rat truncation;
    double residual = 0;
    double tail_bound = 0;
    double tolerance = 0;
    bool pass = false;
    bool completed = false;
    std::size_t channels = 0;
};

ModularityReport check_functional_equation(const SeriesSpec& spec, const GroupGen& gen, const CMatrix& tau,
                                           const Rat& T, double tol = 1e-8, unsigned bits = 128,
                                           unsigned workers = 1, std::optional<bool> force_completed = {});
ModularityReport check_functional_equation(const ThetaData& td, const std::vector<Channel>& ch, bool completed,
                                           const GroupGen& gen, const CMatrix& tau, double tol, unsigned bits);

CMatrix act(const GroupGen& gen, const CMatrix& tau, unsigned bits);

}  // namespace hqm
