#pragma once

#include "hqm/json_io.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hqm::api {

using io::json;

struct Options {
    unsigned precision = 128;  // bits
    double tol = 1e-8;
    std::optional<Rat> trunc;  // Tr N bound; per-genus default when unset
    unsigned workers = 1;
};

// "field info", "lattice enum", ..., "boundary correct"
const std::vector<std::string>& commands();

// Runs one command on a JSON request. Throws io::ValidationError (or
// std::invalid_argument) on bad input.
json run(const std::string& command, const json& request, const Options& opt = {});

// true when the result is a verification report that did not pass
bool failed_verification(const json& result);

Rat default_truncation(int g);

}  // namespace hqm::api
