#pragma once

#include "hqm/boundary.hpp"
#include "hqm/cycles.hpp"
#include "hqm/fpoly.hpp"
#include "hqm/hlattice.hpp"
#include "hqm/numeric.hpp"
#include "hqm/thetagen.hpp"
#include "hqm/torcoh.hpp"

#include "json.hpp"

#include <stdexcept>
#include <string>

namespace hqm::io {

using json = nlohmann::ordered_json;

// bad user input; the CLI maps it to exit code 2
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// "3", "-1/2", "w", "1-2*w", "3/2+w"; numbers and [a, b] pairs are accepted too
FieldElem parse_field_elem(long d, const std::string& s);
FieldElem field_elem_from_json(long d, const json& j);
json to_json(const FieldElem& x);

// FieldElem syntax or "(u)+(v)*i"
Coef parse_coef(long d, const std::string& s);
json to_json(const Coef& x);
Coef coef_from_json(long d, const json& j);

Rat rat_from_json(const json& j);
json to_json(const Rat& x);

json to_json(const Matrix<FieldElem>& m);
Matrix<FieldElem> matrix_from_json(long d, const json& j);
Vec vec_from_json(long d, const json& j);
json to_json(const Vec& v);

// {"re": "...", "im": "..."} with enough digits for the given precision
json to_json(const Cplx& z, unsigned bits);
Cplx cplx_from_json(const json& j);
json to_json(const CMatrix& m, unsigned bits);
CMatrix cmatrix_from_json(const json& j);
// "i", "2i", "0.2+1.1i", "-0.5" (scalar times identity) or a full matrix
CMatrix parse_tau(const json& j, std::size_t g, unsigned bits);

// terms [{"I":[...], "J":[...], "c":...}]
json to_json(const CohClass& x);
CohClass coh_class_from_json(const RingPtr& r, const json& j);
json to_json(const FPoly& p);
FPoly fpoly_from_json(const FamilyPtr& fam, const json& j);

HermLattice lattice_from_json(const json& j);  // {"d":..., "gram":[[...]]}

json to_json(const ModularityReport& r, unsigned bits);
ModularityReport report_from_json(const json& j);
json to_json(const QExpansion& q);

}  // namespace hqm::io
