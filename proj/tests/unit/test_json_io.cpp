#include "doctest.h"

#include "hqm/api.hpp"

#include <random>

using namespace hqm;
using io::json;

TEST_CASE("field elements and coefficients round trip") {
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> num(-9, 9), den(1, 6);
    for (long d : {1L, 2L, 3L, 7L}) {
        for (int s = 0; s < 50; ++s) {
            Rat a(num(rng)), b(num(rng));
            a /= den(rng);
            b /= den(rng);
            FieldElem x(d, a, b), y(d, b, a);
            CHECK(io::field_elem_from_json(d, io::to_json(x)) == x);
            Coef c(x, d == 1 ? FieldElem(0) : y);
            CHECK(io::coef_from_json(d, io::to_json(c)) == c);
        }
    }
    CHECK(io::parse_field_elem(3, "w") == FieldElem(3, 0, 1));
    CHECK(io::parse_field_elem(3, " -1/2 - w ") == FieldElem(3, Rat(-1, 2), -1));
    CHECK(io::parse_field_elem(2, "3*w+2-w") == FieldElem(2, 2, 2));
    CHECK(io::field_elem_from_json(1, json::array({"1/2", 3})) == FieldElem(1, Rat(1, 2), 3));
    for (const char* bad : {"", "1/0", "x", "1/2/3", "w*w", "1.5"}) CHECK_THROWS_AS(io::parse_field_elem(1, bad), io::ValidationError);
}

TEST_CASE("tau parsing") {
    PrecisionGuard pg(128);
    auto t = io::parse_tau("i", 2, 128);
    CHECK(t(0, 0).im == 1);
    CHECK(t(0, 1).abs() == 0);
    t = io::parse_tau("0.25+2i", 1, 128);
    CHECK(t(0, 0).re == Real("0.25"));
    CHECK(t(0, 0).im == 2);
    CHECK_THROWS_AS(io::parse_tau("0.25-2i", 1, 128), io::ValidationError);
    t = io::parse_tau(json::parse(R"([["1.1i", "0.2"], ["0.2", "0.9i"]])"), 2, 128);
    CHECK(t(1, 0).re == Real("0.2"));
    CHECK_THROWS_AS(io::parse_tau(json::parse(R"([["1i", "2i"], ["2i", "1i"]])"), 2, 128), io::ValidationError);
}

TEST_CASE("command outputs re-parse into their types") {
    api::Options opt;
    json lat{{"d", 1}, {"gram", json::parse("[[1,0],[0,2]]")}};

    auto en = api::run("lattice enum", json{{"d", 3}, {"gram", json::parse("[[1]]")}, {"bound", "1/3"}}, opt);
    CHECK(en["count"] == 7);
    for (auto& v : en["vectors"]) CHECK(io::rat_from_json(v["norm"]) <= Rat(1, 3));

    auto basis = api::run("cohomology basis", json{{"d", 1}, {"gram", lat["gram"]}, {"l", 1}}, opt);
    auto ring = CohRing::make(make_field(1), {1, 2});
    for (auto& c : basis["classes"]) {
        auto x = io::coh_class_from_json(ring, c);
        CHECK(x.is_rational());
        CHECK(io::to_json(x) == c);
    }

    auto dec = api::run("cycles decompose", json{{"d", 1}, {"gram", lat["gram"]}, {"g", 1}}, opt);
    auto fam = ring->family();
    for (auto& e : dec["entries"]) {
        auto p = io::fpoly_from_json(fam, e["p_raised"]);
        CHECK(io::to_json(p) == e["p_raised"]);
        CHECK(p.lower(p.genus() - e["ell"].get<int>() + 1).is_zero());
    }

    json mreq{{"kind", "completed"}, {"poly", "h"}, {"d", 1}, {"gram", json::parse("[[1]]")}, {"g", 1}, {"tau", "0.1+1.3i"}};
    auto rep = api::run("modularity check", mreq, opt);
    auto r = io::report_from_json(rep);
    CHECK(r.pass);
    json again = io::to_json(r, opt.precision);
    again["kind"] = rep["kind"];
    CHECK(again == rep);

    auto q = api::run("qexp", json{{"kind", "weighted"}, {"poly", "h"}, {"d", 1}, {"gram", json::parse("[[1]]")}}, opt);
    CHECK(q["meta"]["weight"] == 3);
    for (auto& c : q["coefficients"]) {
        auto N = io::matrix_from_json(1, c["N"]);
        auto v = io::coef_from_json(1, c["value"]);
        CHECK(v.is_rational());
        CHECK(io::to_json(N) == c["N"]);
    }
}

TEST_CASE("validation") {
    api::Options opt;
    auto bad = [&](const char* cmd, const char* req) { CHECK_THROWS(api::run(cmd, json::parse(req), opt)); };
    bad("fspace dim", R"({"n": 2, "g": 3})");
    bad("field info", R"({"d": 9})");
    bad("lattice disc", R"({"d": 1, "gram": [[1, 2], [3, 1]]})");
    bad("lattice enum", R"({"d": 1, "gram": [[1]]})");
    bad("modularity check", R"({"d": 1, "gram": [[1]], "kind": "weighted", "poly": "h", "tau": "-i"})");
    bad("modularity check", R"({"d": 1, "gram": [[1]], "kind": "nope", "poly": "h"})");
    bad("modularity check", R"({"d": 1, "gram": [[1]], "kind": "weighted", "poly": "h", "generator": "m", "A": [[2]]})");
    bad("cycles class", R"({"d": 1, "gram": [[1, 1], [1, 2]], "lambda": [[1, 0]]})");
    bad("nope", "{}");
    opt.precision = 10;
    bad("fspace dim", R"({"n": 2, "g": 1})");
    CHECK(api::failed_verification(json{{"pass", false}}));
    CHECK_FALSE(api::failed_verification(json{{"dim", 9}}));
    CHECK(api::commands().size() == 14);
}
