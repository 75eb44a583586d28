#include "hqm/json_io.hpp"

#include <algorithm>
#include <cctype>

namespace hqm::io {

namespace {

std::string strip(const std::string& s) {
    std::string out;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) out += c;
    return out;
}

Rat parse_rat(const std::string& s) {
    if (s.empty()) throw ValidationError("empty number");
    std::size_t slash = s.find('/');
    auto digits = [](const std::string& t, bool sign) {
        if (t.empty()) return false;
        std::size_t i = sign && (t[0] == '-' || t[0] == '+') ? 1 : 0;
        if (i == t.size()) return false;
        for (; i < t.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
        return true;
    };
    std::string num = slash == std::string::npos ? s : s.substr(0, slash);
    std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
    if (!digits(num, true) || !digits(den, false)) throw ValidationError("malformed rational: " + s);
    if (num[0] == '+') num.erase(0, 1);
    Int n(num), m(den);
    if (m == 0) throw ValidationError("zero denominator: " + s);
    Rat r(n);
    r /= m;
    return r;
}

// split at top-level + and - (not the leading sign, not inside parentheses)
std::vector<std::string> terms_of(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if ((c == '+' || c == '-') && depth == 0 && !cur.empty() && cur.back() != '*' && cur.back() != '/') {
            out.push_back(cur);
            cur.clear();
        }
        cur += c;
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::string unparen(std::string s) {
    if (s.size() >= 2 && s.front() == '(' && s.back() == ')') return s.substr(1, s.size() - 2);
    return s;
}

void check_field(long d) {
    if (d <= 0) throw ValidationError("d must be a positive squarefree integer");
}

json subset_json(Mask m) {
    json a = json::array();
    for (int i : mask_to_subset(m)) a.push_back(i);
    return a;
}

Subset subset_from(const json& j, int n) {
    Subset s;
    for (auto& x : j) {
        int v = x.get<int>();
        if (v < 0 || v >= n) throw ValidationError("index out of range in subset");
        s.push_back(v);
    }
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end()) throw ValidationError("repeated index in subset");
    return s;
}

Real parse_real(const std::string& s) {
    if (s.empty()) throw ValidationError("empty real number");
    try {
        std::size_t used = 0;
        (void)std::stod(s, &used);
        if (used != s.size()) throw ValidationError("malformed real number: " + s);
    } catch (const std::logic_error&) {
        throw ValidationError("malformed real number: " + s);
    }
    return Real(s);
}

Cplx parse_complex_scalar(const std::string& in) {
    std::string s = strip(in);
    if (s.empty()) throw ValidationError("empty complex number");
    Cplx z(0);
    for (auto& t : terms_of(s)) {
        std::string u = t;
        if (u[0] == '+') u.erase(0, 1);
        if (!u.empty() && u.back() == 'i') {
            u.pop_back();
            if (!u.empty() && u.back() == '*') u.pop_back();
            if (u.empty() || u == "-") u += "1";
            z.im += parse_real(u);
        } else {
            z.re += parse_real(u);
        }
    }
    return z;
}

}  // namespace

FieldElem parse_field_elem(long d, const std::string& in) {
    check_field(d);
    std::string s = strip(in);
    if (s.empty()) throw ValidationError("empty field element");
    Rat a(0), b(0);
    for (auto& t : terms_of(s)) {
        std::string u = t;
        if (u[0] == '+') u.erase(0, 1);
        bool neg = !u.empty() && u[0] == '-';
        std::string body = neg ? u.substr(1) : u;
        bool is_w = !body.empty() && body.back() == 'w';
        if (is_w) {
            body.pop_back();
            if (!body.empty() && body.back() == '*') body.pop_back();
            if (body.empty()) body = "1";
        }
        Rat v = parse_rat(body);
        if (neg) v = -v;
        (is_w ? b : a) += v;
    }
    return FieldElem(d, a, b);
}

FieldElem field_elem_from_json(long d, const json& j) {
    check_field(d);
    if (j.is_number_integer()) return FieldElem(d, Rat(j.get<long>()), Rat(0));
    if (j.is_string()) return parse_field_elem(d, j.get<std::string>());
    if (j.is_array() && j.size() == 2) return FieldElem(d, rat_from_json(j[0]), rat_from_json(j[1]));
    throw ValidationError("expected a field element, got " + j.dump());
}

json to_json(const FieldElem& x) { return x.str(); }

Coef parse_coef(long d, const std::string& in) {
    std::string s = strip(in);
    std::string tail = ")*i";
    if (s.size() > tail.size() && s.compare(s.size() - tail.size(), tail.size(), tail) == 0) {
        // (u)+(v)*i
        auto parts = terms_of(s.substr(0, s.size() - 2));
        if (parts.size() != 2 || parts[1][0] != '+') throw ValidationError("malformed coefficient: " + in);
        FieldElem u = parse_field_elem(d, unparen(parts[0]));
        FieldElem v = parse_field_elem(d, unparen(parts[1].substr(1)));
        return Coef(u, v);
    }
    return Coef(parse_field_elem(d, s));
}

json to_json(const Coef& x) { return x.str(); }

Coef coef_from_json(long d, const json& j) {
    if (j.is_string()) return parse_coef(d, j.get<std::string>());
    return Coef(field_elem_from_json(d, j));
}

Rat rat_from_json(const json& j) {
    if (j.is_number_integer()) return Rat(j.get<long>());
    if (j.is_string()) return parse_rat(strip(j.get<std::string>()));
    throw ValidationError("expected a rational, got " + j.dump());
}

json to_json(const Rat& x) {
    if (x.get_den() == 1 && x.get_num().fits_slong_p()) return x.get_num().get_si();
    return x.get_str();
}

json to_json(const Matrix<FieldElem>& m) {
    json a = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
        a.push_back(row);
    }
    return a;
}

Matrix<FieldElem> matrix_from_json(long d, const json& j) {
    if (!j.is_array()) throw ValidationError("expected a matrix");
    std::size_t r = j.size(), c = r ? j[0].size() : 0;
    Matrix<FieldElem> m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
        if (!j[i].is_array() || j[i].size() != c) throw ValidationError("ragged matrix");
        for (std::size_t k = 0; k < c; ++k) m(i, k) = field_elem_from_json(d, j[i][k]);
    }
    return m;
}

Vec vec_from_json(long d, const json& j) {
    if (!j.is_array()) throw ValidationError("expected a vector");
    Vec v;
    for (auto& x : j) v.push_back(field_elem_from_json(d, x));
    return v;
}

json to_json(const Vec& v) {
    json a = json::array();
    for (auto& x : v) a.push_back(to_json(x));
    return a;
}

json to_json(const Cplx& z, unsigned bits) {
    int digits = static_cast<int>(digits10_for_bits(bits));
    return json{{"re", to_string(z.re, digits)}, {"im", to_string(z.im, digits)}};
}

Cplx cplx_from_json(const json& j) {
    if (j.is_object()) return {parse_real(j.at("re").get<std::string>()), parse_real(j.at("im").get<std::string>())};
    if (j.is_string()) return parse_complex_scalar(j.get<std::string>());
    if (j.is_number()) return parse_complex_scalar(j.dump());
    if (j.is_array() && j.size() == 2) return {parse_real(j[0].dump()), parse_real(j[1].dump())};
    throw ValidationError("expected a complex number, got " + j.dump());
}

json to_json(const CMatrix& m, unsigned bits) {
    json a = json::array();
    for (std::size_t i = 0; i < m.rows; ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols; ++j) row.push_back(to_json(m(i, j), bits));
        a.push_back(row);
    }
    return a;
}

CMatrix cmatrix_from_json(const json& j) {
    if (!j.is_array()) throw ValidationError("expected a complex matrix");
    std::size_t r = j.size(), c = r ? j[0].size() : 0;
    CMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
        if (!j[i].is_array() || j[i].size() != c) throw ValidationError("ragged complex matrix");
        for (std::size_t k = 0; k < c; ++k) m(i, k) = cplx_from_json(j[i][k]);
    }
    return m;
}

CMatrix parse_tau(const json& j, std::size_t g, unsigned bits) {
    PrecisionGuard pg(bits);
    CMatrix tau;
    if (j.is_array() && !j.empty() && j[0].is_array()) {
        tau = cmatrix_from_json(j);
        if (tau.rows != g || tau.cols != g) throw ValidationError("tau must be " + std::to_string(g) + " x " + std::to_string(g));
    } else {
        Cplx s = cplx_from_json(j);
        tau = CMatrix(g, g);
        for (std::size_t i = 0; i < g; ++i) tau(i, i) = s;
    }
    CMatrix Y(g, g);
    for (std::size_t a = 0; a < g; ++a)
        for (std::size_t b = 0; b < g; ++b) {
            Cplx z = tau(a, b) - tau(b, a).conj();
            Y(a, b) = Cplx(z.im / 2, -z.re / 2);
        }
    if (!is_positive_definite(Y)) throw ValidationError("tau is not in the upper half-space");
    return tau;
}

json to_json(const CohClass& x) {
    json a = json::array();
    for (auto& [k, c] : x.terms()) a.push_back(json{{"I", subset_json(k.first)}, {"J", subset_json(k.second)}, {"c", to_json(c)}});
    return a;
}

CohClass coh_class_from_json(const RingPtr& r, const json& j) {
    if (!j.is_array()) throw ValidationError("expected a list of class terms");
    CohClass x(r);
    for (auto& t : j) {
        auto I = subset_to_mask(subset_from(t.at("I"), r->n()));
        auto J = subset_to_mask(subset_from(t.at("J"), r->n()));
        x.add_term(I, J, coef_from_json(r->field().d, t.at("c")));
    }
    return x;
}

json to_json(const FPoly& p) {
    json terms = json::array();
    const auto& fam = *p.family();
    const auto& subs = fam.subsets(p.genus());
    for (std::size_t b = 0; b < p.coeffs().size(); ++b) {
        if (p.coeffs()[b].is_zero()) continue;
        auto [i, j] = fam.pair_of(p.genus(), b);
        json I = subs[i], J = subs[j];
        terms.push_back(json{{"I", I}, {"J", J}, {"c", to_json(p.coeffs()[b])}});
    }
    return json{{"n", p.n()}, {"g", p.genus()}, {"terms", terms}};
}

FPoly fpoly_from_json(const FamilyPtr& fam, const json& j) {
    if (!j.is_object()) throw ValidationError("expected a polynomial object");
    int n = j.at("n").get<int>(), g = j.at("g").get<int>();
    if (n != fam->n()) throw ValidationError("polynomial has the wrong number of variables");
    if (g < 0 || g > n) throw ValidationError("polynomial genus out of range");
    FPoly p(fam, g);
    for (auto& t : j.at("terms")) {
        Subset I = subset_from(t.at("I"), n), J = subset_from(t.at("J"), n);
        if (static_cast<int>(I.size()) != g || static_cast<int>(J.size()) != g)
            throw ValidationError("minor size does not match the genus");
        p.set(I, J, p.coeff(I, J) + coef_from_json(fam->field().d, t.at("c")));
    }
    return p;
}

HermLattice lattice_from_json(const json& j) {
    long d = j.at("d").get<long>();
    QuadField k;
    try {
        k = make_field(d);
    } catch (const std::invalid_argument& e) {
        throw ValidationError(e.what());
    }
    auto g = matrix_from_json(d, j.at("gram"));
    if (g.rows() == 0 || g.rows() != g.cols()) throw ValidationError("gram must be a nonempty square matrix");
    try {
        return HermLattice(k, g);
    } catch (const std::invalid_argument& e) {
        throw ValidationError(e.what());
    }
}

json to_json(const ModularityReport& r, unsigned bits) {
    return json{{"generator", r.generator},
                {"tau", to_json(r.tau, bits)},
                {"residual", r.residual},
                {"tail_bound", r.tail_bound},
                {"pass", r.pass},
                {"tolerance", r.tolerance},
                {"truncation", to_json(r.truncation)},
                {"completed", r.completed},
                {"channels", r.channels},
                {"precision", bits}};
}

ModularityReport report_from_json(const json& j) {
    ModularityReport r;
    PrecisionGuard pg(j.at("precision").get<unsigned>());
    r.generator = j.at("generator").get<std::string>();
    r.tau = cmatrix_from_json(j.at("tau"));
    r.residual = j.at("residual").get<double>();
    r.tail_bound = j.at("tail_bound").get<double>();
    r.pass = j.at("pass").get<bool>();
    r.tolerance = j.at("tolerance").get<double>();
    r.truncation = rat_from_json(j.at("truncation"));
    r.completed = j.at("completed").get<bool>();
    r.channels = j.at("channels").get<std::size_t>();
    return r;
}

json to_json(const QExpansion& q) {
    json meta{{"d", q.d}, {"gram", to_json(q.gram)}, {"g", q.g}, {"weight", q.weight}, {"T", to_json(q.T)}, {"kind", q.kind}};
    if (!q.labels.empty()) meta["labels"] = q.labels;
    json coeffs = json::array();
    for (auto& c : q.coefficients) {
        json v;
        if (auto* x = std::get_if<Coef>(&c.value)) v = to_json(*x);
        else if (auto* y = std::get_if<CohClass>(&c.value)) v = to_json(*y);
        else {
            v = json::array();
            for (auto& z : std::get<std::vector<Coef>>(c.value)) v.push_back(to_json(z));
        }
        coeffs.push_back(json{{"nu", c.cosets}, {"N", to_json(c.N)}, {"value", v}});
    }
    return json{{"meta", meta}, {"coefficients", coeffs}};
}

}  // namespace hqm::io
