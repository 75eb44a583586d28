#pragma once

// r_J by direct search: the smallest r = p/q (p <= max_p, q <= max_q) for which
// x -> x + (r/delta) h(x, e) e maps every basis vector of L into L and moves every
// discriminant representative by a vector of L.

#include "hqm/hlattice.hpp"

#include <algorithm>
#include <optional>

namespace oracle {

inline std::optional<hqm::Rat> rj_bruteforce(const hqm::HermLattice& L, const hqm::Vec& e, long max_p = 100,
                                             long max_q = 12) {
    using namespace hqm;
    const auto& k = L.field();
    FieldElem di = k.delta().inverse();
    std::vector<Vec> probes;
    for (std::size_t i = 0; i < L.rank(); ++i) {
        Vec b(L.rank(), FieldElem(0));
        b[i] = FieldElem(1);
        probes.push_back(b);
    }
    DiscGroup D(L);
    for (std::size_t i = 0; i < D.order(); ++i) probes.push_back(D.rep_vector(i));
    // coordinates of the displacement (1/delta) h(x, e) e of every probe
    std::vector<Rat> coords;
    for (auto& x : probes) {
        FieldElem s = L.h(x, e) * di;
        for (auto& y : e) {
            FieldElem m = s * y;
            coords.push_back(m.a());
            coords.push_back(m.b());
        }
    }
    std::sort(coords.begin(), coords.end());
    coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
    std::vector<Rat> cand;
    for (long q = 1; q <= max_q; ++q)
        for (long p = 1; p <= max_p; ++p) {
            Rat r(p);
            r /= q;
            cand.push_back(r);
        }
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    for (auto& r : cand) {
        bool good = true;
        for (std::size_t i = 0; i < coords.size() && good; ++i) {
            Rat m = r * coords[i];
            good = m.get_den() == 1;
        }
        if (good) return r;
    }
    return std::nullopt;
}

}  // namespace oracle
