#pragma once

#include <span>
#include <vector>

#include "sepbell/pairings.hpp"
#include "sepbell/types.hpp"

namespace sepbell {

/// Dense single-qudit operator.
struct LocalOperator {
    int dim = 0;
    Matrix entries;

    [[nodiscard]] bool is_hermitian(double tolerance = 1e-14) const;
    /// Largest |eigenvalue| of a Hermitian operator.
    [[nodiscard]] double spectral_radius() const;
};

struct Triplet {
    Index row = 0;
    Index col = 0;
    cplx value;

    friend bool operator==(const Triplet&, const Triplet&) = default;
};

/// Sparse operator on N qudits of dimension D.
///
/// Basis index convention is big-endian: site 0 is the most significant
/// base-D digit of a row or column index. Triplets are kept sorted by
/// (row, col), with no duplicates and no explicit zeros.
class GlobalOperator {
public:
    GlobalOperator() = default;
    GlobalOperator(int num_sites, int dim, std::vector<Triplet> triplets);

    [[nodiscard]] int num_sites() const noexcept { return num_sites_; }
    [[nodiscard]] int dim() const noexcept { return dim_; }
    [[nodiscard]] Index size() const noexcept { return size_; }
    [[nodiscard]] const std::vector<Triplet>& triplets() const noexcept { return triplets_; }
    [[nodiscard]] std::size_t nonzeros() const noexcept { return triplets_.size(); }

    [[nodiscard]] GlobalOperator adjoint() const;
    [[nodiscard]] bool is_hermitian(double tolerance = 1e-14) const;

    /// y = A x
    [[nodiscard]] Vector apply(const Vector& x) const;
    /// <psi|A|psi>
    [[nodiscard]] cplx expectation(const Vector& psi) const;
    /// Tr(rho A) for a dense rho.
    [[nodiscard]] cplx trace_with(const Matrix& rho) const;

    /// Dense copy; throws SizeLimit above cap.
    [[nodiscard]] Matrix to_dense(Index cap = Limits{}.max_dense_dim) const;

    /// a*A + b*B, exact zeros dropped.
    static GlobalOperator combine(cplx a, const GlobalOperator& lhs, cplx b, const GlobalOperator& rhs);

    friend bool operator==(const GlobalOperator&, const GlobalOperator&) = default;

private:
    int num_sites_ = 0;
    int dim_ = 0;
    Index size_ = 0;
    std::vector<Triplet> triplets_;
};

LocalOperator local_sigma(const PairingIndexSet& pairing);
/// (sigma + sigma^dagger) / 2
LocalOperator local_sigma_plus(const PairingIndexSet& pairing);
/// (sigma - sigma^dagger) / (2i)
LocalOperator local_sigma_minus(const PairingIndexSet& pairing);

/// U A U^dagger. U must be unitary to 1e-12.
LocalOperator conjugate(const LocalOperator& op, const Matrix& unitary);

/// Tensor product of per-site sigma operators. Sites may carry distinct sets
/// but must share one dimension.
GlobalOperator global_sigma(std::span<const PairingIndexSet> pairings,
                            Index cap = Limits{}.max_operator_dim);
GlobalOperator global_sigma_plus(std::span<const PairingIndexSet> pairings,
                                 Index cap = Limits{}.max_operator_dim);
GlobalOperator global_sigma_minus(std::span<const PairingIndexSet> pairings,
                                  Index cap = Limits{}.max_operator_dim);

/// Hermitian and anti-Hermitian parts of an operator whose support does not
/// overlap its adjoint off the diagonal (true for every Sigma_I).
GlobalOperator hermitian_part(const GlobalOperator& op);
GlobalOperator antihermitian_part(const GlobalOperator& op);

/// Sparse Kronecker product of dense local factors, big-endian.
GlobalOperator kron(std::span<const LocalOperator> factors, Index cap = Limits{}.max_operator_dim);

enum class Part { Plus, Minus };

/// One measurement setting: coefficient * (x)_n sigma^{pattern[n]}_{I_n}.
struct SettingTerm {
    double coefficient = 0.0;
    std::vector<Part> pattern;
    std::vector<LocalOperator> factors;
};

struct SettingDecomposition {
    std::vector<SettingTerm> plus_terms;   // expands Sigma_I^+
    std::vector<SettingTerm> minus_terms;  // expands Sigma_I^-
};

/// Expands (x)_n (sigma^+ + i sigma^-) over sign patterns. A pattern with m
/// minus factors contributes Re(i^m) to Sigma^+ and Im(i^m) to Sigma^-, so
/// each part keeps exactly 2^{N-1} terms.
SettingDecomposition setting_decomposition(std::span<const PairingIndexSet> pairings);

/// Sum of coefficient * kron(factors) over terms.
GlobalOperator reconstruct(std::span<const SettingTerm> terms, Index cap = Limits{}.max_operator_dim);

}  // namespace sepbell
