#include <doctest.h>

#include <set>

#include "oracles.hpp"
#include "sepbell/errors.hpp"
#include "sepbell/pairings.hpp"

using namespace sepbell;

namespace {

oracle::MatchingKey key_of(const PairingIndexSet& s)
{
    return {s.pairs, s.unpaired.value_or(-1)};
}

}  // namespace

TEST_CASE("enumerate_pairings: small dimensions")
{
    const auto two = enumerate_pairings(2);
    REQUIRE(two.size() == 1);
    CHECK(two[0].pairs == std::vector<std::pair<int, int>>{{0, 1}});
    CHECK_FALSE(two[0].unpaired.has_value());
    CHECK(two[0].eta == cplx{0.0, 0.0});

    const auto four = enumerate_pairings(4);
    REQUIRE(four.size() == 3);
    CHECK(four[0].pairs == std::vector<std::pair<int, int>>{{0, 1}, {2, 3}});
    CHECK(four[1].pairs == std::vector<std::pair<int, int>>{{0, 2}, {1, 3}});
    CHECK(four[2].pairs == std::vector<std::pair<int, int>>{{0, 3}, {1, 2}});

    const auto three = enumerate_pairings(3, cplx{1.0, 0.0});
    REQUIRE(three.size() == 3);
    std::set<int> unpaired;
    for (const auto& s : three) {
        unpaired.insert(*s.unpaired);
        CHECK(s.eta == cplx{1.0, 0.0});
    }
    CHECK(unpaired == std::set<int>{0, 1, 2});

    CHECK(enumerate_pairings(6).size() == 15);
}

TEST_CASE("enumeration matches brute-force permutation oracle for D = 2..8")
{
    for (int dim = 2; dim <= 8; ++dim) {
        CAPTURE(dim);
        const auto listed = enumerate_pairings(dim);
        const auto expected = oracle::brute_force_matchings(dim);
        std::set<oracle::MatchingKey> got;
        for (const auto& s : listed) {
            s.validate();
            got.insert(key_of(s));
        }
        CHECK(got.size() == listed.size());  // no duplicates
        CHECK(got == expected);
        CHECK(count_pairings(dim) == expected.size());
    }
}

TEST_CASE("count_pairings values and recurrence")
{
    CHECK(count_pairings(2) == 1);
    CHECK(count_pairings(3) == 3);
    CHECK(count_pairings(5) == 15);
    CHECK(count_pairings(8) == 105);
    CHECK(count_pairings(12) == 10395);
    for (int dim = 4; dim <= 16; dim += 2) {
        CHECK(count_pairings(dim) == static_cast<std::uint64_t>(dim - 1) * count_pairings(dim - 2));
    }
}

TEST_CASE("enumeration order is canonical and deterministic")
{
    for (int dim = 2; dim <= 7; ++dim) {
        const auto a = enumerate_pairings(dim);
        const auto b = enumerate_pairings(dim);
        CHECK(a == b);
        for (std::size_t i = 1; i < a.size(); ++i) {
            CHECK(canonical_less(a[i - 1], a[i]));
        }
        for (const auto& s : a) {
            for (std::size_t r = 1; r < s.pairs.size(); ++r) {
                CHECK(s.pairs[r - 1].first < s.pairs[r].first);
            }
        }
    }
}

TEST_CASE("canonical_pairing")
{
    CHECK(canonical_pairing(4).pairs == std::vector<std::pair<int, int>>{{0, 1}, {2, 3}});
    CHECK(canonical_pairing(2).pairs == std::vector<std::pair<int, int>>{{0, 1}});
    const auto five = canonical_pairing(5, cplx{1.0, 0.0});
    CHECK(five.pairs == std::vector<std::pair<int, int>>{{0, 1}, {2, 3}});
    CHECK(five.unpaired == 4);
    CHECK(five.eta == cplx{1.0, 0.0});
    // canonical set comes first in the enumeration
    for (int dim = 2; dim <= 8; ++dim) {
        CHECK(enumerate_pairings(dim).front() == canonical_pairing(dim));
    }
}

TEST_CASE("pairing errors")
{
    auto code_of = [](auto&& f) {
        try {
            f();
        } catch (const Error& e) {
            return e.code();
        }
        FAIL("expected an error");
        return ErrorCode::Format;
    };
    CHECK(code_of([] { enumerate_pairings(1); }) == ErrorCode::InvalidDimension);
    CHECK(code_of([] { count_pairings(0); }) == ErrorCode::InvalidDimension);
    CHECK(code_of([] { enumerate_pairings(3, cplx{0.5, 0.0}); }) == ErrorCode::InvalidPhase);
    CHECK(code_of([] { canonical_pairing(5, cplx{2.0, 0.0}); }) == ErrorCode::InvalidPhase);
    // eta is ignored for even D
    CHECK_NOTHROW(enumerate_pairings(4, cplx{0.3, 0.0}));

    PairingIndexSet broken = canonical_pairing(4);
    broken.pairs[1] = {1, 3};  // label 1 repeated
    CHECK(code_of([&] { broken.validate(); }) == ErrorCode::InvalidParameter);
    broken = canonical_pairing(4);
    broken.pairs[0] = {1, 0};
    CHECK(code_of([&] { broken.validate(); }) == ErrorCode::InvalidParameter);
    broken = canonical_pairing(3);
    broken.unpaired.reset();
    CHECK(code_of([&] { broken.validate(); }) == ErrorCode::InvalidParameter);
}

TEST_CASE("unimodular eta is carried through for odd D")
{
    const cplx eta = std::polar(1.0, 0.7);
    for (const auto& s : enumerate_pairings(5, eta)) {
        CHECK(s.eta == eta);
        CHECK_NOTHROW(s.validate());
    }
}
