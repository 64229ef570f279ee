#include "sepbell/operators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "sepbell/errors.hpp"

namespace sepbell {
namespace {

constexpr cplx kMinusHalfI{0.0, -0.5};
constexpr cplx kHalfI{0.0, 0.5};

bool triplet_order(const Triplet& a, const Triplet& b)
{
    return a.row != b.row ? a.row < b.row : a.col < b.col;
}

// Sorts, sums duplicates, drops exact zeros.
std::vector<Triplet> normalize(std::vector<Triplet> triplets)
{
    std::sort(triplets.begin(), triplets.end(), triplet_order);
    std::vector<Triplet> out;
    out.reserve(triplets.size());
    for (const auto& t : triplets) {
        if (!out.empty() && out.back().row == t.row && out.back().col == t.col) {
            out.back().value += t.value;
        } else {
            out.push_back(t);
        }
    }
    std::erase_if(out, [](const Triplet& t) { return t.value == cplx{0.0, 0.0}; });
    return out;
}

int common_dim(std::span<const PairingIndexSet> pairings)
{
    if (pairings.empty()) {
        throw Error(ErrorCode::InvalidParameter, "need at least one site");
    }
    const int dim = pairings.front().dim;
    for (const auto& p : pairings) {
        p.validate();
        if (p.dim != dim) {
            throw Error(ErrorCode::DimensionMismatch, "all sites must share one qudit dimension, got " +
                                                          std::to_string(dim) + " and " + std::to_string(p.dim));
        }
    }
    return dim;
}

struct LocalEntry {
    int row;
    int col;
    cplx value;
};

std::vector<LocalEntry> sigma_entries(const PairingIndexSet& pairing)
{
    std::vector<LocalEntry> entries;
    for (const auto& [i, j] : pairing.pairs) {
        entries.push_back({i, j, cplx{2.0, 0.0}});
    }
    if (pairing.unpaired) {
        entries.push_back({*pairing.unpaired, *pairing.unpaired, pairing.eta});
    }
    return entries;
}

}  // namespace

bool LocalOperator::is_hermitian(double tolerance) const
{
    return (entries - entries.adjoint()).cwiseAbs().maxCoeff() <= tolerance;
}

double LocalOperator::spectral_radius() const
{
    Eigen::SelfAdjointEigenSolver<Matrix> solver(entries, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

GlobalOperator::GlobalOperator(int num_sites, int dim, std::vector<Triplet> triplets)
    : num_sites_(num_sites), dim_(dim), size_(hilbert_dim(num_sites, dim)), triplets_(normalize(std::move(triplets)))
{
    if (num_sites < 1 || dim < 2 || size_ == 0) {
        throw Error(ErrorCode::InvalidDimension, "operator needs N >= 1 and D >= 2");
    }
    for (const auto& t : triplets_) {
        if (t.row >= size_ || t.col >= size_) {
            throw Error(ErrorCode::InvalidParameter, "triplet index outside D^N");
        }
    }
}

GlobalOperator GlobalOperator::adjoint() const
{
    std::vector<Triplet> out;
    out.reserve(triplets_.size());
    for (const auto& t : triplets_) {
        out.push_back({t.col, t.row, std::conj(t.value)});
    }
    return {num_sites_, dim_, std::move(out)};
}

bool GlobalOperator::is_hermitian(double tolerance) const
{
    const auto diff = combine(1.0, *this, -1.0, adjoint());
    return std::all_of(diff.triplets_.begin(), diff.triplets_.end(),
                       [&](const Triplet& t) { return std::abs(t.value) <= tolerance; });
}

Vector GlobalOperator::apply(const Vector& x) const
{
    if (static_cast<Index>(x.size()) != size_) {
        throw Error(ErrorCode::DimensionMismatch, "vector length does not match operator dimension");
    }
    Vector y = Vector::Zero(x.size());
    for (const auto& t : triplets_) {
        y(static_cast<Eigen::Index>(t.row)) += t.value * x(static_cast<Eigen::Index>(t.col));
    }
    return y;
}

cplx GlobalOperator::expectation(const Vector& psi) const
{
    if (static_cast<Index>(psi.size()) != size_) {
        throw Error(ErrorCode::DimensionMismatch, "state length does not match operator dimension");
    }
    cplx sum{0.0, 0.0};
    for (const auto& t : triplets_) {
        sum += std::conj(psi(static_cast<Eigen::Index>(t.row))) * t.value * psi(static_cast<Eigen::Index>(t.col));
    }
    return sum;
}

cplx GlobalOperator::trace_with(const Matrix& rho) const
{
    if (static_cast<Index>(rho.rows()) != size_ || static_cast<Index>(rho.cols()) != size_) {
        throw Error(ErrorCode::DimensionMismatch, "density matrix does not match operator dimension");
    }
    // Tr(rho A) = sum_{r,c} rho(c, r) A(r, c)
    cplx sum{0.0, 0.0};
    for (const auto& t : triplets_) {
        sum += rho(static_cast<Eigen::Index>(t.col), static_cast<Eigen::Index>(t.row)) * t.value;
    }
    return sum;
}

Matrix GlobalOperator::to_dense(Index cap) const
{
    if (size_ > cap) {
        throw Error(ErrorCode::SizeLimit,
                    "dense operator of dimension " + std::to_string(size_) + " exceeds cap " + std::to_string(cap));
    }
    const auto n = static_cast<Eigen::Index>(size_);
    Matrix dense = Matrix::Zero(n, n);
    for (const auto& t : triplets_) {
        dense(static_cast<Eigen::Index>(t.row), static_cast<Eigen::Index>(t.col)) += t.value;
    }
    return dense;
}

GlobalOperator GlobalOperator::combine(cplx a, const GlobalOperator& lhs, cplx b, const GlobalOperator& rhs)
{
    if (lhs.num_sites_ != rhs.num_sites_ || lhs.dim_ != rhs.dim_) {
        throw Error(ErrorCode::DimensionMismatch, "cannot combine operators on different spaces");
    }
    std::vector<Triplet> merged;
    merged.reserve(lhs.triplets_.size() + rhs.triplets_.size());
    for (const auto& t : lhs.triplets_) {
        merged.push_back({t.row, t.col, a * t.value});
    }
    for (const auto& t : rhs.triplets_) {
        merged.push_back({t.row, t.col, b * t.value});
    }
    return {lhs.num_sites_, lhs.dim_, std::move(merged)};
}

LocalOperator local_sigma(const PairingIndexSet& pairing)
{
    pairing.validate();
    LocalOperator op{pairing.dim, Matrix::Zero(pairing.dim, pairing.dim)};
    for (const auto& e : sigma_entries(pairing)) {
        op.entries(e.row, e.col) = e.value;
    }
    return op;
}

LocalOperator local_sigma_plus(const PairingIndexSet& pairing)
{
    const auto sigma = local_sigma(pairing);
    Matrix adj = sigma.entries.adjoint();
    return {sigma.dim, 0.5 * sigma.entries + 0.5 * adj};
}

LocalOperator local_sigma_minus(const PairingIndexSet& pairing)
{
    const auto sigma = local_sigma(pairing);
    Matrix adj = sigma.entries.adjoint();
    return {sigma.dim, kMinusHalfI * sigma.entries + kHalfI * adj};
}

LocalOperator conjugate(const LocalOperator& op, const Matrix& unitary)
{
    if (unitary.rows() != op.dim || unitary.cols() != op.dim) {
        throw Error(ErrorCode::DimensionMismatch, "unitary must be D x D");
    }
    const Matrix check = unitary * unitary.adjoint() - Matrix::Identity(op.dim, op.dim);
    if (check.cwiseAbs().maxCoeff() > 1e-12) {
        throw Error(ErrorCode::InvalidParameter, "conjugating matrix is not unitary");
    }
    return {op.dim, unitary * op.entries * unitary.adjoint()};
}

GlobalOperator global_sigma(std::span<const PairingIndexSet> pairings, Index cap)
{
    const int dim = common_dim(pairings);
    const int num_sites = static_cast<int>(pairings.size());
    checked_hilbert_dim(num_sites, dim, cap, "global_sigma");

    // Cartesian product of per-site nonzeros; indices accumulate big-endian.
    std::vector<Triplet> current{{0, 0, cplx{1.0, 0.0}}};
    for (const auto& pairing : pairings) {
        const auto entries = sigma_entries(pairing);
        std::vector<Triplet> next;
        next.reserve(current.size() * entries.size());
        for (const auto& t : current) {
            for (const auto& e : entries) {
                next.push_back({t.row * static_cast<Index>(dim) + static_cast<Index>(e.row),
                                t.col * static_cast<Index>(dim) + static_cast<Index>(e.col), t.value * e.value});
            }
        }
        current = std::move(next);
    }
    return {num_sites, dim, std::move(current)};
}

GlobalOperator hermitian_part(const GlobalOperator& op)
{
    return GlobalOperator::combine(0.5, op, 0.5, op.adjoint());
}

GlobalOperator antihermitian_part(const GlobalOperator& op)
{
    return GlobalOperator::combine(kMinusHalfI, op, kHalfI, op.adjoint());
}

GlobalOperator global_sigma_plus(std::span<const PairingIndexSet> pairings, Index cap)
{
    return hermitian_part(global_sigma(pairings, cap));
}

GlobalOperator global_sigma_minus(std::span<const PairingIndexSet> pairings, Index cap)
{
    return antihermitian_part(global_sigma(pairings, cap));
}

GlobalOperator kron(std::span<const LocalOperator> factors, Index cap)
{
    if (factors.empty()) {
        throw Error(ErrorCode::InvalidParameter, "kron needs at least one factor");
    }
    const int dim = factors.front().dim;
    for (const auto& f : factors) {
        if (f.dim != dim || f.entries.rows() != dim || f.entries.cols() != dim) {
            throw Error(ErrorCode::DimensionMismatch, "kron factors must share one dimension");
        }
    }
    const int num_sites = static_cast<int>(factors.size());
    checked_hilbert_dim(num_sites, dim, cap, "kron");

    std::vector<Triplet> current{{0, 0, cplx{1.0, 0.0}}};
    for (const auto& f : factors) {
        std::vector<Triplet> next;
        for (const auto& t : current) {
            for (int r = 0; r < dim; ++r) {
                for (int c = 0; c < dim; ++c) {
                    const cplx v = f.entries(r, c);
                    if (v != cplx{0.0, 0.0}) {
                        next.push_back({t.row * static_cast<Index>(dim) + static_cast<Index>(r),
                                        t.col * static_cast<Index>(dim) + static_cast<Index>(c), t.value * v});
                    }
                }
            }
        }
        current = std::move(next);
    }
    return {num_sites, dim, std::move(current)};
}

SettingDecomposition setting_decomposition(std::span<const PairingIndexSet> pairings)
{
    common_dim(pairings);
    const auto num_sites = pairings.size();
    std::vector<LocalOperator> plus;
    std::vector<LocalOperator> minus;
    for (const auto& p : pairings) {
        plus.push_back(local_sigma_plus(p));
        minus.push_back(local_sigma_minus(p));
    }

    SettingDecomposition out;
    const std::uint64_t patterns = std::uint64_t{1} << num_sites;
    for (std::uint64_t bits = 0; bits < patterns; ++bits) {
        SettingTerm term;
        int minus_count = 0;
        for (std::size_t n = 0; n < num_sites; ++n) {
            // bit for site 0 is the most significant, so patterns enumerate
            // in the same big-endian order as basis labels
            const bool is_minus = (bits >> (num_sites - 1 - n)) & 1U;
            term.pattern.push_back(is_minus ? Part::Minus : Part::Plus);
            term.factors.push_back(is_minus ? minus[n] : plus[n]);
            minus_count += is_minus ? 1 : 0;
        }
        // i^m cycles 1, i, -1, -i
        switch (minus_count % 4) {
        case 0: term.coefficient = 1.0; out.plus_terms.push_back(std::move(term)); break;
        case 1: term.coefficient = 1.0; out.minus_terms.push_back(std::move(term)); break;
        case 2: term.coefficient = -1.0; out.plus_terms.push_back(std::move(term)); break;
        default: term.coefficient = -1.0; out.minus_terms.push_back(std::move(term)); break;
        }
    }
    return out;
}

GlobalOperator reconstruct(std::span<const SettingTerm> terms, Index cap)
{
    if (terms.empty()) {
        throw Error(ErrorCode::InvalidParameter, "no terms to reconstruct");
    }
    GlobalOperator total = kron(terms.front().factors, cap);
    total = GlobalOperator::combine(terms.front().coefficient, total, 0.0, total);
    for (std::size_t t = 1; t < terms.size(); ++t) {
        total = GlobalOperator::combine(1.0, total, terms[t].coefficient, kron(terms[t].factors, cap));
    }
    return total;
}

}  // namespace sepbell
