#include "hqm/api.hpp"

#include "hqm/weilrep.hpp"

#include <functional>
#include <map>

namespace hqm::api {

namespace {

using io::ValidationError;

template <class T>
T get_or(const json& r, const char* key, T fallback) {
    if (!r.contains(key) || r.at(key).is_null()) return fallback;
    return r.at(key).get<T>();
}

const json& need(const json& r, const char* key) {
    if (!r.contains(key) || r.at(key).is_null()) throw ValidationError(std::string("missing input: ") + key);
    return r.at(key);
}

long field_d(const json& r) {
    long d = get_or<long>(r, "d", 1);
    if (d <= 0 || !is_squarefree(d)) throw ValidationError("d must be a positive squarefree integer");
    return d;
}

HermLattice lattice(const json& r) {
    json l{{"d", field_d(r)}, {"gram", need(r, "gram")}};
    return io::lattice_from_json(l);
}

Rat truncation(const Options& opt, int g) { return opt.trunc ? *opt.trunc : default_truncation(g); }

int genus(const json& r, int fallback = 1) {
    int g = get_or<int>(r, "g", fallback);
    if (g < 0) throw ValidationError("g must be nonnegative");
    return g;
}

FamilyPtr family(const json& r) {
    auto k = make_field(field_d(r));
    if (r.contains("gram")) {
        auto gram = io::matrix_from_json(k.d, r.at("gram"));
        if (gram.rows() == 0 || gram.rows() != gram.cols()) throw ValidationError("gram must be a nonempty square matrix");
        return FFamily::make(k, gram);
    }
    int n = get_or<int>(r, "n", 0);
    if (n < 1) throw ValidationError("n must be positive");
    return FFamily::identity(k, n);
}

RingPtr ring(const HermLattice& L) {
    try {
        return ring_for(L);
    } catch (const std::invalid_argument& e) {
        throw ValidationError(e.what());
    }
}

// named weights: "h" is Lambda^g applied to the constant 1 (for g = 1 the form h(x, x))
FPoly poly(const FamilyPtr& fam, const json& r, int g) {
    const json& p = need(r, "poly");
    if (p.is_string()) {
        std::string s = p.get<std::string>();
        if (g < 0 || g > fam->n()) throw ValidationError("genus out of range for the polynomial");
        if (s == "h") return FPoly::one(fam).raise(g);
        if (s == "one" && g == 0) return FPoly::one(fam);
        throw ValidationError("unknown polynomial name: " + s);
    }
    auto P = io::fpoly_from_json(fam, p);
    if (P.genus() != g) throw ValidationError("polynomial genus does not match g");
    return P;
}

GroupGen generator(const json& r, long d, std::size_t g) {
    std::string s = get_or<std::string>(r, "generator", "w");
    auto square = [&](const char* key) {
        auto m = io::matrix_from_json(d, need(r, key));
        if (m.rows() != g || m.cols() != g) throw ValidationError(std::string(key) + " must be g x g");
        return m;
    };
    if (s == "w") return GroupGen::w_gen();
    if (s == "n") {
        auto B = square("B");
        if (!is_hermitian(B)) throw ValidationError("B must be Hermitian");
        for (auto& x : B.data())
            if (!x.is_integral()) throw ValidationError("B must be integral");
        return GroupGen::n_gen(B);
    }
    if (s == "m") {
        auto A = square("A");
        for (auto& x : A.data())
            if (!x.is_integral()) throw ValidationError("A must be integral");
        FieldElem det = linalg::determinant(A);
        if (!(det.is_integral() && det.norm() == 1)) throw ValidationError("A must be invertible over O_k");
        return GroupGen::m_gen(A);
    }
    throw ValidationError("generator must be one of m, n, w");
}

SeriesSpec series(const json& r) {
    SeriesSpec s;
    try {
        s.kind = kind_from_name(get_or<std::string>(r, "kind", "weighted"));
    } catch (const std::invalid_argument& e) {
        throw ValidationError(e.what());
    }
    s.lattice = lattice(r);
    s.g = genus(r);
    if (s.g < 1 || s.g > static_cast<int>(s.lattice.rank())) throw ValidationError("need 1 <= g <= rank");
    if (s.lattice.definiteness() != Definiteness::positive) throw ValidationError("theta series need a positive lattice");
    if (s.kind == SeriesSpec::Kind::weighted || s.kind == SeriesSpec::Kind::completed)
        s.poly = poly(FFamily::make(s.lattice.field(), s.lattice.gram()), r, s.g);
    else {
        ring(s.lattice);
        s.test_classes = get_or<bool>(r, "test_classes", false);
    }
    return s;
}

json lattice_vector(const LatticeVector& v) {
    return json{{"z", v.z}, {"x", io::to_json(v.x)}, {"norm", io::to_json(v.norm)}, {"coset", v.coset}};
}

std::size_t coset_index(const DiscGroup& D, const json& j) {
    if (j.is_number_integer()) {
        long i = j.get<long>();
        if (i < 0 || static_cast<std::size_t>(i) >= D.order()) throw ValidationError("coset index out of range");
        return static_cast<std::size_t>(i);
    }
    auto v = io::vec_from_json(D.lattice().field().d, j);
    if (v.size() != D.lattice().rank()) throw ValidationError("coset vector has the wrong length");
    if (!D.lattice().in_dual(v)) throw ValidationError("coset vector is not in the dual lattice");
    return D.index_of(v);
}

Vec isotropic(const HermLattice& L, const json& r) {
    if (r.contains("e") && !r.at("e").is_null()) {
        auto e = io::vec_from_json(L.field().d, r.at("e"));
        if (e.size() != L.rank()) throw ValidationError("e has the wrong length");
        if (!L.h(e, e).is_zero()) throw ValidationError("e is not isotropic");
        return e;
    }
    for (std::size_t i = 0; i < L.rank(); ++i)
        if (L.gram()(i, i).is_zero()) {
            Vec e(L.rank(), FieldElem(0));
            e[i] = FieldElem(1);
            return e;
        }
    for (long b = 1; b <= 3; ++b) {
        auto iso = find_isotropic(L, b);
        if (!iso.empty()) return iso.front();
    }
    throw ValidationError("no isotropic vector found with coordinates up to 3; pass e");
}

BoundaryData boundary(const json& r, Vec* e_out) {
    auto L = lattice(r);
    if (L.definiteness() != Definiteness::lorentzian || L.pos_index() < 1)
        throw ValidationError("boundary data need a lattice of signature (n+1, 1)");
    Vec e = isotropic(L, r);
    if (e_out) *e_out = e;
    return analyze_boundary(L, e);
}

json field_info(const json& r, const Options&) {
    auto k = make_field(field_d(r));
    json units = json::array();
    for (auto& u : k.units()) units.push_back(io::to_json(u));
    return json{{"d", k.d},
                {"disc", k.disc},
                {"omega", k.omega_half ? "(1+sqrt(-d))/2" : "sqrt(-d)"},
                {"omega_trace", omega_trace(k.d)},
                {"omega_norm", io::to_json(omega_norm(k.d))},
                {"delta", io::to_json(k.delta())},
                {"class_number_one", k.class_number_one()},
                {"units", units}};
}

json lattice_enum(const json& r, const Options& opt) {
    auto L = lattice(r);
    if (L.definiteness() != Definiteness::positive) throw ValidationError("enumeration needs a positive lattice");
    DiscGroup D(L);
    EnumOptions eo;
    eo.workers = opt.workers;
    std::string region = get_or<std::string>(r, "region", "dual");
    if (region == "lattice") eo.region = Region::lattice;
    else if (region != "dual") throw ValidationError("region must be dual or lattice");
    if (r.contains("N")) {
        auto N = io::matrix_from_json(L.field().d, r.at("N"));
        std::optional<std::vector<std::size_t>> cos;
        if (r.contains("cosets")) {
            cos.emplace();
            for (auto& c : r.at("cosets")) cos->push_back(coset_index(D, c));
        }
        auto tuples = enumerate_tuples(L, D, N, cos, eo);
        json out = json::array();
        for (auto& t : tuples) {
            json row = json::array();
            for (auto& v : t) row.push_back(lattice_vector(v));
            out.push_back(row);
        }
        return json{{"count", tuples.size()}, {"tuples", out}};
    }
    Rat bound = io::rat_from_json(need(r, "bound"));
    auto vs = enumerate_vectors(L, D, bound, eo);
    json out = json::array();
    for (auto& v : vs) out.push_back(lattice_vector(v));
    return json{{"count", vs.size()}, {"vectors", out}};
}

constexpr std::size_t kListLimit = 4096;

json lattice_disc(const json& r, const Options&) {
    auto L = lattice(r);
    DiscGroup D(L);
    json inv = json::array();
    for (auto& x : D.invariant_factors()) inv.push_back(io::to_json(Rat(x)));
    json out{{"order", D.order()}, {"invariant_factors", inv}};
    if (D.order() > kListLimit) {
        out["cosets"] = nullptr;
        return out;
    }
    json cos = json::array();
    for (std::size_t i = 0; i < D.order(); ++i)
        cos.push_back(json{{"index", i}, {"rep", io::to_json(D.rep_vector(i))}, {"qnorm", io::to_json(D.qnorm(i))}});
    out["cosets"] = cos;
    return out;
}

json weilrep_matrix(const json& r, const Options& opt) {
    auto L = lattice(r);
    int g = genus(r);
    if (g < 1) throw ValidationError("g must be positive");
    std::string conv = get_or<std::string>(r, "convention", "full");
    if (conv != "full" && conv != "half") throw ValidationError("convention must be full or half");
    WeilRep rep(L, static_cast<std::size_t>(g), conv == "full" ? WeilConvention::full : WeilConvention::half);
    if (rep.dim() > kListLimit) throw ValidationError("representation too large to print: dim " + std::to_string(rep.dim()));
    auto gen = generator(r, L.field().d, static_cast<std::size_t>(g));
    auto idx = weil_index(rep, opt.precision);
    CMatrix m = rho_gen(rep, gen, opt.precision);
    json meta{{"d", L.field().d},
              {"gram", io::to_json(L.gram())},
              {"g", g},
              {"gamma_branch", idx.branch},
              {"gamma_eighth", idx.eighth},
              {"convention", conv},
              {"precision", opt.precision}};
    return json{{"meta", meta}, {"dim", rep.dim()}, {"matrix", io::to_json(m, opt.precision)}};
}

json fspace_dim(const json& r, const Options&) {
    int n = get_or<int>(r, "n", 0), g = genus(r, 0);
    if (n < 1 || g > n) throw ValidationError("need n >= 1 and 0 <= g <= n");
    return json{{"dim", binomial(n, g) * binomial(n, g)}};
}

json fspace_sl2(const json& r, const Options&) {
    auto fam = family(r);
    auto rep = check_sl2(fspace_module(fam));
    json out{{"pass", rep.pass}};
    if (!rep.pass) out["failures"] = rep.failures;
    return out;
}

json fspace_project(const json& r, const Options&) {
    auto fam = family(r);
    auto P = poly(fam, r, genus(r));
    auto parts = lefschetz_decompose(P);
    json out = json::array();
    for (auto& p : parts)
        out.push_back(json{{"ell", p.ell}, {"primitive", io::to_json(p.q)}, {"raised", io::to_json(p.q.raise(P.genus() - p.ell))}});
    bool ok = lefschetz_reassemble(parts, P.genus()) == P;
    return json{{"parts", out}, {"pass", ok}};
}

json cohomology_basis(const json& r, const Options&) {
    auto L = lattice(r);
    auto R = ring(L);
    int l = get_or<int>(r, "l", 1);
    if (l < 0 || l > R->n()) throw ValidationError("l out of range");
    bool prim = get_or<bool>(r, "primitive", false);
    auto basis = prim ? primitive_hodge_basis(R, l) : rational_hodge_basis(R, l);
    json out = json::array();
    for (auto& x : basis) out.push_back(io::to_json(x));
    return json{{"l", l}, {"primitive", prim}, {"classes", out}};
}

FTuple tuple_input(const HermLattice& L, const json& r) {
    const json& lam = need(r, "lambda");
    if (!lam.is_array() || lam.empty()) throw ValidationError("lambda must be a nonempty list of vectors");
    FTuple t;
    for (auto& v : lam) {
        auto x = io::vec_from_json(L.field().d, v);
        if (x.size() != L.rank()) throw ValidationError("lambda vector has the wrong length");
        t.push_back(x);
    }
    if (t.size() > L.rank()) throw ValidationError("more vectors than the rank");
    return t;
}

json cycles_class(const json& r, const Options&) {
    auto L = lattice(r);
    auto R = ring(L);
    auto t = tuple_input(L, r);
    bool corr = get_or<bool>(r, "corrected", false);
    CohClass c = corr ? corrected_class(R, t) : cycle_class(R, t);
    return json{{"g", t.size()}, {"corrected", corr}, {"class", io::to_json(c)}};
}

json cycles_decompose(const json& r, const Options&) {
    auto L = lattice(r);
    auto R = ring(L);
    int g = genus(r);
    if (g < 1 || g > R->n()) throw ValidationError("need 1 <= g <= rank");
    auto tab = decompose_cycle_function(R, g);
    json out = json::array();
    for (auto& e : tab.entries)
        out.push_back(json{{"ell", e.ell},
                           {"index", e.index},
                           {"w", io::to_json(e.w)},
                           {"p_top", io::to_json(e.p_top)},
                           {"p_raised", io::to_json(e.p_raised)}});
    return json{{"g", g}, {"entries", out}, {"pass", tab.reassemble() == cycle_class_fn(R, g)}};
}

json qexp_cmd(const json& r, const Options& opt) {
    auto s = series(r);
    auto q = qexp(s, truncation(opt, s.g), opt.workers);
    json out = io::to_json(q);
    out["meta"]["n_compatible"] = check_n_compatibility(q, s.lattice);
    return out;
}

json modularity(const json& r, const Options& opt) {
    auto s = series(r);
    auto gen = generator(r, s.lattice.field().d, static_cast<std::size_t>(s.g));
    CMatrix tau = io::parse_tau(get_or<json>(r, "tau", "i"), static_cast<std::size_t>(s.g), opt.precision);
    std::optional<bool> force;
    if (r.contains("completed")) force = r.at("completed").get<bool>();
    auto rep = check_functional_equation(s, gen, tau, truncation(opt, s.g), opt.tol, opt.precision, opt.workers, force);
    json out = io::to_json(rep, opt.precision);
    out["kind"] = kind_name(s.kind);
    return out;
}

json boundary_analyze(const json& r, const Options&) {
    Vec e;
    auto bd = boundary(r, &e);
    json arrow = json::array();
    for (std::size_t nu = 0; nu < bd.DL.order(); ++nu)
        if (auto a = arrow_up(bd, nu)) arrow.push_back(json::array({nu, *a}));
    return json{{"e", io::to_json(e)},
                {"M_gram", io::to_json(bd.M.gram())},
                {"r_J", io::to_json(bd.rJ)},
                {"H_J", bd.HJ.size()},
                {"content", io::to_json(bd.content)},
                {"disc_L", bd.DL.order()},
                {"disc_M", bd.DM.order()},
                {"arrow", arrow}};
}

json boundary_correct(const json& r, const Options& opt) {
    Vec e;
    auto bd = boundary(r, &e);
    int g = genus(r);
    if (g < 1 || 2 * g > static_cast<int>(bd.M.rank())) throw ValidationError("need 1 <= g and 2g <= rank of M");
    std::vector<std::size_t> cos;
    if (r.contains("cosets"))
        for (auto& c : r.at("cosets")) cos.push_back(coset_index(bd.DL, c));
    else
        cos.assign(static_cast<std::size_t>(g), 0);
    if (cos.size() != static_cast<std::size_t>(g)) throw ValidationError("need g cosets");
    auto N = io::matrix_from_json(bd.L.field().d, need(r, "N"));
    if (N.rows() != static_cast<std::size_t>(g) || N.cols() != static_cast<std::size_t>(g)) throw ValidationError("N must be g x g");
    if (!bd.M.gram().is_zero()) {
        bool diagonal = true;
        for (std::size_t i = 0; i < bd.M.rank(); ++i)
            for (std::size_t j = 0; j < bd.M.rank(); ++j)
                if (i != j && !bd.M.gram()(i, j).is_zero()) diagonal = false;
        if (!diagonal) throw ValidationError("the quotient lattice at this cusp is not diagonal; choose another e");
    }
    auto c = assemble_correction(bd, g, cos, N, opt.workers);
    json terms = json::array();
    for (auto& t : c.terms)
        terms.push_back(json{{"ell", t.ell},
                             {"index", t.index},
                             {"lefschetz_power", t.lefschetz_power},
                             {"coefficient", io::to_json(t.coefficient)},
                             {"w", io::to_json(t.w)}});
    return json{{"e", io::to_json(e)},
                {"r_J", io::to_json(bd.rJ)},
                {"supported", c.supported},
                {"arrow", c.arrow},
                {"tuples", c.tuples},
                {"terms", terms}};
}

using Handler = std::function<json(const json&, const Options&)>;

const std::map<std::string, Handler>& table() {
    static const std::map<std::string, Handler> t{
        {"field info", field_info},
        {"lattice enum", lattice_enum},
        {"lattice disc", lattice_disc},
        {"weilrep matrix", weilrep_matrix},
        {"fspace dim", fspace_dim},
        {"fspace sl2-check", fspace_sl2},
        {"fspace project", fspace_project},
        {"cohomology basis", cohomology_basis},
        {"cycles class", cycles_class},
        {"cycles decompose", cycles_decompose},
        {"qexp", qexp_cmd},
        {"modularity check", modularity},
        {"boundary analyze", boundary_analyze},
        {"boundary correct", boundary_correct},
    };
    return t;
}

}  // namespace

const std::vector<std::string>& commands() {
    static const std::vector<std::string> c{"field info",       "lattice enum",     "lattice disc",  "weilrep matrix",
                                            "fspace dim",       "fspace sl2-check", "fspace project", "cohomology basis",
                                            "cycles class",     "cycles decompose", "qexp",          "modularity check",
                                            "boundary analyze", "boundary correct"};
    return c;
}

json run(const std::string& command, const json& request, const Options& opt) {
    auto it = table().find(command);
    if (it == table().end()) throw ValidationError("unknown command: " + command);
    if (!request.is_object()) throw ValidationError("request must be a JSON object");
    if (opt.precision < 53) throw ValidationError("precision must be at least 53 bits");
    if (!(opt.tol > 0)) throw ValidationError("tolerance must be positive");
    if (opt.trunc && sgn(*opt.trunc) < 0) throw ValidationError("truncation must be nonnegative");
    if (opt.workers < 1) throw ValidationError("workers must be positive");
    return it->second(request, opt);
}

bool failed_verification(const json& result) {
    return result.is_object() && result.contains("pass") && result.at("pass").is_boolean() && !result.at("pass").get<bool>();
}

Rat default_truncation(int g) { return g <= 1 ? Rat(24) : Rat(6); }

}  // namespace hqm::api
