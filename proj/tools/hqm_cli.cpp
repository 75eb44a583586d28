#include "hqm/api.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

using hqm::api::json;

namespace {

enum class Arg { integer, text, value, flag };

struct Flag {
    std::string names;  // CLI11 spelling, e.g. "-g,--g"
    std::string key;    // request key
    Arg type;
    std::string help;
};

const Flag kD{"--d", "d", Arg::integer, "field Q(sqrt(-d))"};
const Flag kGram{"--gram", "gram", Arg::value, "Hermitian Gram matrix as JSON"};
const Flag kG{"-g,--g", "g", Arg::integer, "genus"};
const Flag kN{"-n,--n", "n", Arg::integer, "number of variables"};
const Flag kPoly{"--poly", "poly", Arg::value, "polynomial JSON or a name (h)"};
const Flag kKind{"--kind", "kind", Arg::text, "cycles, corrected, weighted or completed"};
const Flag kTests{"--test-classes", "test_classes", Arg::flag, "pair cycle classes with the rational test classes"};
const Flag kGen{"--generator", "generator", Arg::text, "m, n or w"};
const Flag kA{"--A", "A", Arg::value, "matrix for m(A)"};
const Flag kB{"--B", "B", Arg::value, "matrix for n(B)"};
const Flag kE{"--e", "e", Arg::value, "primitive isotropic vector"};

const std::vector<std::pair<std::string, std::vector<Flag>>>& layout() {
    static const std::vector<std::pair<std::string, std::vector<Flag>>> t{
        {"field info", {kD}},
        {"lattice enum",
         {kD, kGram, {"--bound", "bound", Arg::value, "norm bound"},
          {"--region", "region", Arg::text, "dual or lattice"},
          {"--N", "N", Arg::value, "Gram target for tuples"},
          {"--cosets", "cosets", Arg::value, "coset indices or vectors for tuples"}}},
        {"lattice disc", {kD, kGram}},
        {"weilrep matrix", {kD, kGram, kG, kGen, kA, kB, {"--convention", "convention", Arg::text, "full or half"}}},
        {"fspace dim", {kN, kG}},
        {"fspace sl2-check", {kN, kD, kGram}},
        {"fspace project", {kN, kD, kGram, kG, kPoly}},
        {"cohomology basis",
         {kD, kGram, {"-l,--l", "l", Arg::integer, "Hodge degree"},
          {"--primitive", "primitive", Arg::flag, "primitive classes only"}}},
        {"cycles class",
         {kD, kGram, {"--lambda", "lambda", Arg::value, "list of vectors"},
          {"--corrected", "corrected", Arg::flag, "corrected class"}}},
        {"cycles decompose", {kD, kGram, kG}},
        {"qexp", {kKind, kPoly, kD, kGram, kG, kTests}},
        {"modularity check", {kKind, kPoly, kD, kGram, kG, kTests, kGen, kA, kB, {"--tau", "tau", Arg::value, "i, x+yi or a matrix"}}},
        {"boundary analyze", {kD, kGram, kE}},
        {"boundary correct",
         {kD, kGram, kE, kG, {"--N", "N", Arg::value, "Gram target"},
          {"--cosets", "cosets", Arg::value, "coset indices or dual vectors"}}},
    };
    return t;
}

json parse_value(const std::string& s) {
    auto first = s.find_first_not_of(" \t\n");
    if (first != std::string::npos && (s[first] == '[' || s[first] == '{')) return json::parse(s);
    try {
        return json::parse(s);
    } catch (const json::parse_error&) {
        return s;  // bare strings such as "i" or "h"
    }
}

struct Leaf {
    CLI::App* app = nullptr;
    std::map<std::string, std::string> text;
    std::map<std::string, bool> flags;
    std::vector<Flag> spec;
};

int emit(const json& out, const std::string& path) {
    std::string s = out.dump() + "\n";
    if (path.empty()) {
        std::cout << s << std::flush;
        return 0;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        std::cerr << "cannot write " << path << "\n";
        return 2;
    }
    f << s;
    return 0;
}

int fail(const std::string& msg) {
    std::cerr << "error: " << msg << "\n";
    std::cout << json{{"error", msg}}.dump() << "\n";
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hermitian theta series and special cycle toolkit"};
    app.require_subcommand(1);

    unsigned precision = 128, workers = 1;
    double tol = 1e-8;
    std::string trunc, out_path, input;
    std::map<std::string, CLI::App*> groups;
    std::vector<std::pair<std::string, Leaf>> leaves;
    leaves.reserve(layout().size());

    for (auto& [name, flags] : layout()) {
        auto space = name.find(' ');
        CLI::App* parent = &app;
        std::string leaf_name = name;
        if (space != std::string::npos) {
            std::string group = name.substr(0, space);
            leaf_name = name.substr(space + 1);
            if (!groups.count(group)) {
                groups[group] = app.add_subcommand(group, group + " commands");
                groups[group]->require_subcommand(1);
            }
            parent = groups[group];
        }
        leaves.emplace_back(name, Leaf{});
        Leaf& leaf = leaves.back().second;
        leaf.spec = flags;
        leaf.app = parent->add_subcommand(leaf_name, name);
        for (auto& f : flags) {
            if (f.type == Arg::flag) leaf.app->add_flag(f.names, leaf.flags[f.key], f.help);
            else leaf.app->add_option(f.names, leaf.text[f.key], f.help);
        }
        leaf.app->add_option("--precision", precision, "working precision in bits")->capture_default_str();
        leaf.app->add_option("--tol", tol, "tolerance for numeric checks")->capture_default_str();
        leaf.app->add_option("--trunc", trunc, "truncation bound on Tr N");
        leaf.app->add_option("--workers", workers, "worker threads")->capture_default_str();
        leaf.app->add_option("--out", out_path, "write the result to a file");
        leaf.app->add_option("--input", input, "request JSON (inline or a file path)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        for (auto& [name, leaf] : leaves) {
            if (!leaf.app->parsed()) continue;
            json req = json::object();
            if (!input.empty()) {
                std::string text = input;
                std::ifstream f(input);
                if (f) {
                    std::stringstream ss;
                    ss << f.rdbuf();
                    text = ss.str();
                }
                req = json::parse(text);
                if (!req.is_object()) return fail("--input must hold a JSON object");
            }
            for (auto& f : leaf.spec) {
                auto* opt = leaf.app->get_option(f.names.substr(0, f.names.find(',')));
                if (opt->count() == 0) continue;
                switch (f.type) {
                    case Arg::flag: req[f.key] = leaf.flags[f.key]; break;
                    case Arg::integer:
                        try {
                            req[f.key] = std::stol(leaf.text[f.key]);
                        } catch (const std::logic_error&) {
                            return fail(f.key + " must be an integer");
                        }
                        break;
                    case Arg::text: req[f.key] = leaf.text[f.key]; break;
                    case Arg::value: req[f.key] = parse_value(leaf.text[f.key]); break;
                }
            }
            hqm::api::Options opt;
            opt.precision = precision;
            opt.tol = tol;
            opt.workers = workers;
            if (!trunc.empty()) opt.trunc = hqm::io::rat_from_json(json(trunc));
            json result = hqm::api::run(name, req, opt);
            int rc = emit(result, out_path);
            if (rc) return rc;
            return hqm::api::failed_verification(result) ? 3 : 0;
        }
        return fail("no command given");
    } catch (const hqm::io::ValidationError& e) {
        return fail(e.what());
    } catch (const std::invalid_argument& e) {
        return fail(e.what());
    } catch (const std::domain_error& e) {
        return fail(e.what());
    } catch (const json::exception& e) {
        return fail(std::string("malformed JSON: ") + e.what());
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
