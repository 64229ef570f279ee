#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sepbell/types.hpp"

namespace sepbell {

/// One index set I: a partition of the basis labels {0..D-1} into disjoint
/// ordered pairs (i < j), plus one unpaired label k carrying a unimodular
/// phase eta when D is odd. For even D, eta is stored as 0.
struct PairingIndexSet {
    int dim = 2;
    std::vector<std::pair<int, int>> pairs;
    std::optional<int> unpaired;
    cplx eta{0.0, 0.0};

    /// M: D/2 for even D, (D-1)/2 for odd D.
    [[nodiscard]] int pair_count() const noexcept { return static_cast<int>(pairs.size()); }

    /// Nonzero entries of the local operator built from this set: M + [D odd].
    [[nodiscard]] int local_nonzeros() const noexcept { return pair_count() + (unpaired ? 1 : 0); }

    /// Throws InvalidDimension / InvalidPhase / InvalidParameter when an invariant is broken.
    void validate() const;

    /// Stable text key, e.g. "4:(0,1)(2,3)" or "3:(0,1)k2".
    [[nodiscard]] std::string key() const;

    friend bool operator==(const PairingIndexSet&, const PairingIndexSet&) = default;
};

/// Canonical order: pair lists lexicographically, then unpaired index.
bool canonical_less(const PairingIndexSet& a, const PairingIndexSet& b);

/// Every index set for `dim`, in canonical order. `eta` must be unimodular
/// when dim is odd and is ignored otherwise.
std::vector<PairingIndexSet> enumerate_pairings(int dim, cplx eta = cplx{1.0, 0.0});

/// (D-1)!! for even D, (D-2)!! * D for odd D.
std::uint64_t count_pairings(int dim);

/// {(0,1),(2,3),...}; for odd D the unpaired index is D-1.
PairingIndexSet canonical_pairing(int dim, cplx eta = cplx{1.0, 0.0});

/// The same canonical set on every one of `num_sites` sites.
std::vector<PairingIndexSet> canonical_pairings(int num_sites, int dim, cplx eta = cplx{1.0, 0.0});

}  // namespace sepbell
