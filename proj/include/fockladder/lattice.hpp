// lattice.hpp — Fock basis of the two-leg ladder and its BEC / impurity operators

#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace fockladder {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};

inline void require_particle_number(int N) {
    if (N < 2 || N % 2 != 0)
        throw std::invalid_argument("unsupported particle number N=" + std::to_string(N) +
                                    " (must be even and >= 2)");
}

// ------------------------------- Fock indexing -------------------------------

/// Site (n, m) of the ladder. n is half the BEC number difference, m = -1 for
/// the left leg and +1 for the right leg.
struct FockIndex {
    int n{0};
    int m{-1};

    friend bool operator==(const FockIndex&, const FockIndex&) = default;
};

inline std::size_t bec_dim(int N) { return static_cast<std::size_t>(N) + 1; }
inline std::size_t ladder_dim(int N) { return 2 * bec_dim(N); }

/// Impurity-major linearization: left leg occupies [0, N], right leg [N+1, 2N+1].
inline std::size_t linear_index(FockIndex s, int N) {
    require_particle_number(N);
    if (s.m != -1 && s.m != 1)
        throw std::invalid_argument("impurity label m must be -1 or +1");
    if (std::abs(s.n) > N / 2)
        throw std::out_of_range("n outside [-N/2, N/2]");
    const std::size_t leg = s.m == -1 ? 0 : 1;
    return leg * bec_dim(N) + static_cast<std::size_t>(s.n + N / 2);
}

inline FockIndex fock_index(std::size_t idx, int N) {
    require_particle_number(N);
    if (idx >= ladder_dim(N)) throw std::out_of_range("linear index outside ladder");
    const std::size_t leg = idx / bec_dim(N);
    const int n = static_cast<int>(idx % bec_dim(N)) - N / 2;
    return {n, leg == 0 ? -1 : 1};
}

/// Recovers N from a composite (2(N+1)) dimension.
inline int particles_from_ladder_dim(Eigen::Index dim) {
    if (dim < 6 || dim % 2 != 0)
        throw std::invalid_argument("dimension is not that of a ladder with even N >= 2");
    const int N = static_cast<int>(dim / 2) - 1;
    require_particle_number(N);
    return N;
}

// --------------------------------- Operator ----------------------------------

enum class OperatorKind { hermitian, unitary, general };

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kUnitaryTol = 1e-10;

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline double hermiticity_error(const Matrix& m) { return max_abs(m - m.adjoint()); }

inline double unitarity_error(const Matrix& m) {
    return max_abs(m.adjoint() * m - Matrix::Identity(m.rows(), m.cols()));
}

/// Dense square matrix tagged with the structural property it is guaranteed to have.
class Operator {
public:
    Operator() = default;

    Operator(Matrix entries, OperatorKind kind) : m_(std::move(entries)), kind_(kind) {
        if (m_.rows() != m_.cols() || m_.rows() == 0)
            throw std::invalid_argument("operator must be a non-empty square matrix");
        if (kind_ == OperatorKind::hermitian && hermiticity_error(m_) > kHermitianTol)
            throw std::invalid_argument("operator tagged hermitian is not hermitian");
        if (kind_ == OperatorKind::unitary && unitarity_error(m_) > kUnitaryTol)
            throw std::invalid_argument("operator tagged unitary is not unitary");
    }

    static Operator general(Matrix entries) { return {std::move(entries), OperatorKind::general}; }

    [[nodiscard]] Eigen::Index dim() const { return m_.rows(); }
    [[nodiscard]] OperatorKind kind() const { return kind_; }
    [[nodiscard]] const Matrix& matrix() const { return m_; }
    [[nodiscard]] cplx operator()(Eigen::Index r, Eigen::Index c) const { return m_(r, c); }

    [[nodiscard]] Operator adjoint() const { return {Matrix(m_.adjoint()), kind_}; }

    friend Operator operator*(const Operator& a, const Operator& b) {
        if (a.dim() != b.dim()) throw std::invalid_argument("operator dimension mismatch");
        const bool unitary = a.kind_ == OperatorKind::unitary && b.kind_ == OperatorKind::unitary;
        return {Matrix(a.m_ * b.m_), unitary ? OperatorKind::unitary : OperatorKind::general};
    }

private:
    Matrix m_;
    OperatorKind kind_{OperatorKind::general};
};

inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

// ------------------------------ BEC (spin N/2) -------------------------------

inline Operator identity(Eigen::Index dim) {
    return {Matrix::Identity(dim, dim), OperatorKind::hermitian};
}

/// S_z, diagonal with entries -N/2 ... N/2.
inline Operator build_sz(int N) {
    require_particle_number(N);
    const auto d = static_cast<Eigen::Index>(bec_dim(N));
    Matrix m = Matrix::Zero(d, d);
    for (Eigen::Index k = 0; k < d; ++k) m(k, k) = static_cast<double>(k - N / 2);
    return {std::move(m), OperatorKind::hermitian};
}

/// <n+1|S_+|n> for spin S = N/2.
inline double raising_element(int N, int n) {
    const double s = 0.5 * N;
    return std::sqrt(s * (s + 1.0) - static_cast<double>(n) * (n + 1));
}

inline Operator build_splus(int N) {
    require_particle_number(N);
    const auto d = static_cast<Eigen::Index>(bec_dim(N));
    Matrix m = Matrix::Zero(d, d);
    for (Eigen::Index k = 0; k + 1 < d; ++k) m(k + 1, k) = raising_element(N, static_cast<int>(k) - N / 2);
    return Operator::general(std::move(m));
}

inline Operator build_sminus(int N) { return Operator::general(build_splus(N).matrix().adjoint()); }

inline Operator build_sx(int N) {
    const Matrix sp = build_splus(N).matrix();
    return {Matrix(0.5 * (sp + sp.adjoint())), OperatorKind::hermitian};
}

inline Operator build_sy(int N) {
    const Matrix sp = build_splus(N).matrix();
    return {Matrix((sp - sp.adjoint()) / (2.0 * kI)), OperatorKind::hermitian};
}

/// Real tridiagonal S_x: diagonal is zero, `sub` holds <n+1|S_x|n>.
inline RealVector sx_offdiagonal(int N) {
    require_particle_number(N);
    RealVector sub(N);
    for (int k = 0; k < N; ++k) sub(k) = 0.5 * raising_element(N, k - N / 2);
    return sub;
}

// ------------------------------ impurity (2 levels) --------------------------

// Basis order is (m = -1, m = +1), i.e. (L, R), so sigma_z = diag(-1, +1).
inline Operator sigma_z() {
    Matrix m(2, 2);
    m << -1.0, 0.0,
          0.0, 1.0;
    return {std::move(m), OperatorKind::hermitian};
}

inline Operator sigma_x() {
    Matrix m(2, 2);
    m << 0.0, 1.0,
         1.0, 0.0;
    return {std::move(m), OperatorKind::hermitian};
}

// ------------------------------ composite space ------------------------------

/// bec ⊗ imp on the ladder, impurity index outermost.
inline Operator embed(const Operator& bec_op, const Operator& imp_op) {
    if (imp_op.dim() != 2) throw std::invalid_argument("impurity operator must be 2x2");
    if (bec_op.dim() < 3 || bec_op.dim() % 2 == 0)
        throw std::invalid_argument("BEC operator dimension must be N+1 with N even");
    Matrix m = Eigen::kroneckerProduct(imp_op.matrix(), bec_op.matrix()).eval();
    OperatorKind kind = OperatorKind::general;
    if (bec_op.kind() == imp_op.kind()) kind = bec_op.kind();
    return {std::move(m), kind};
}

/// Π = (n -> -n) ⊗ σ_x, so Π|n, m> = |-n, -m>.
inline Operator parity_operator(int N) {
    require_particle_number(N);
    const auto d = static_cast<Eigen::Index>(ladder_dim(N));
    Matrix m = Matrix::Zero(d, d);
    for (Eigen::Index k = 0; k < d; ++k) m(d - 1 - k, k) = 1.0;
    return {std::move(m), OperatorKind::hermitian};
}

/// Index of Π|idx>; under the impurity-major layout this is the reversal.
inline std::size_t parity_partner(std::size_t idx, int N) { return ladder_dim(N) - 1 - idx; }

}  // namespace fockladder
