#include "sepbell/pairings.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sepbell/errors.hpp"

namespace sepbell {
namespace {

constexpr double kPhaseTolerance = 1e-12;

void require_dim(int dim)
{
    if (dim < 2) {
        throw Error(ErrorCode::InvalidDimension, "qudit dimension must be >= 2, got " + std::to_string(dim));
    }
}

void require_phase(int dim, cplx eta)
{
    if (dim % 2 == 1 && std::abs(std::abs(eta) - 1.0) > kPhaseTolerance) {
        std::ostringstream msg;
        msg << "odd dimension " << dim << " needs |eta| = 1, got |eta| = " << std::abs(eta);
        throw Error(ErrorCode::InvalidPhase, msg.str());
    }
}

// Pairs the smallest free label with each larger free label in turn, which
// yields matchings in lexicographic order of their sorted pair lists.
void match_labels(std::vector<int>& free_labels, std::vector<std::pair<int, int>>& current,
                  std::vector<std::vector<std::pair<int, int>>>& out)
{
    if (free_labels.empty()) {
        out.push_back(current);
        return;
    }
    const int first = free_labels.front();
    for (std::size_t pos = 1; pos < free_labels.size(); ++pos) {
        const int partner = free_labels[pos];
        std::vector<int> rest;
        rest.reserve(free_labels.size() - 2);
        for (std::size_t q = 1; q < free_labels.size(); ++q) {
            if (q != pos) {
                rest.push_back(free_labels[q]);
            }
        }
        current.emplace_back(first, partner);
        match_labels(rest, current, out);
        current.pop_back();
    }
}

}  // namespace

void PairingIndexSet::validate() const
{
    require_dim(dim);
    const bool odd = dim % 2 == 1;
    const int expected_pairs = odd ? (dim - 1) / 2 : dim / 2;
    if (pair_count() != expected_pairs) {
        throw Error(ErrorCode::InvalidParameter, "index set for D=" + std::to_string(dim) + " needs " +
                                                     std::to_string(expected_pairs) + " pairs, has " +
                                                     std::to_string(pair_count()));
    }
    if (odd != unpaired.has_value()) {
        throw Error(ErrorCode::InvalidParameter,
                    odd ? "odd dimension requires an unpaired index" : "even dimension forbids an unpaired index");
    }
    if (odd) {
        require_phase(dim, eta);
    } else if (eta != cplx{0.0, 0.0}) {
        throw Error(ErrorCode::InvalidPhase, "eta must be 0 for even dimension");
    }
    std::vector<int> seen(static_cast<std::size_t>(dim), 0);
    auto mark = [&](int label) {
        if (label < 0 || label >= dim) {
            throw Error(ErrorCode::InvalidParameter, "label " + std::to_string(label) + " out of range");
        }
        if (seen[static_cast<std::size_t>(label)]++ != 0) {
            throw Error(ErrorCode::InvalidParameter, "label " + std::to_string(label) + " repeated");
        }
    };
    for (const auto& [i, j] : pairs) {
        if (!(i < j)) {
            throw Error(ErrorCode::InvalidParameter, "pair must satisfy i < j");
        }
        mark(i);
        mark(j);
    }
    if (unpaired) {
        mark(*unpaired);
    }
}

std::string PairingIndexSet::key() const
{
    std::ostringstream out;
    out << dim << ':';
    for (const auto& [i, j] : pairs) {
        out << '(' << i << ',' << j << ')';
    }
    if (unpaired) {
        out << 'k' << *unpaired;
    }
    return out.str();
}

bool canonical_less(const PairingIndexSet& a, const PairingIndexSet& b)
{
    if (a.pairs != b.pairs) {
        return a.pairs < b.pairs;
    }
    return a.unpaired.value_or(-1) < b.unpaired.value_or(-1);
}

std::vector<PairingIndexSet> enumerate_pairings(int dim, cplx eta)
{
    require_dim(dim);
    require_phase(dim, eta);
    const bool odd = dim % 2 == 1;

    std::vector<PairingIndexSet> result;
    const int unpaired_choices = odd ? dim : 1;
    for (int k = 0; k < unpaired_choices; ++k) {
        std::vector<int> labels;
        for (int label = 0; label < dim; ++label) {
            if (!odd || label != k) {
                labels.push_back(label);
            }
        }
        std::vector<std::vector<std::pair<int, int>>> matchings;
        std::vector<std::pair<int, int>> current;
        match_labels(labels, current, matchings);
        for (auto& pairs : matchings) {
            PairingIndexSet set;
            set.dim = dim;
            set.pairs = std::move(pairs);
            if (odd) {
                set.unpaired = k;
                set.eta = eta;
            }
            result.push_back(std::move(set));
        }
    }
    std::sort(result.begin(), result.end(), canonical_less);
    return result;
}

std::uint64_t count_pairings(int dim)
{
    require_dim(dim);
    std::uint64_t count = 1;
    if (dim % 2 == 0) {
        for (int f = dim - 1; f > 1; f -= 2) {
            count *= static_cast<std::uint64_t>(f);
        }
    } else {
        for (int f = dim - 2; f > 1; f -= 2) {
            count *= static_cast<std::uint64_t>(f);
        }
        count *= static_cast<std::uint64_t>(dim);
    }
    return count;
}

PairingIndexSet canonical_pairing(int dim, cplx eta)
{
    require_dim(dim);
    require_phase(dim, eta);
    PairingIndexSet set;
    set.dim = dim;
    for (int i = 0; i + 1 < dim; i += 2) {
        set.pairs.emplace_back(i, i + 1);
    }
    if (dim % 2 == 1) {
        set.unpaired = dim - 1;
        set.eta = eta;
    }
    return set;
}

std::vector<PairingIndexSet> canonical_pairings(int num_sites, int dim, cplx eta)
{
    if (num_sites < 1) {
        throw Error(ErrorCode::InvalidParameter, "number of sites must be >= 1");
    }
    return std::vector<PairingIndexSet>(static_cast<std::size_t>(num_sites), canonical_pairing(dim, eta));
}

}  // namespace sepbell
