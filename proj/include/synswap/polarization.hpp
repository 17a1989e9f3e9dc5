// Copyright 2026 The synswap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Finite-dimensional polarization algebra for one to four photons.
//
// Basis convention, used everywhere in this library: each photon is a qubit
// with |H> = index 0 and |V> = index 1. Qubit 0 (photon 1) is the most
// significant bit of a basis index, so |H>_1|V>_2 is index 0b01 = 1.
// Angles cross every public boundary in degrees, measured from the H axis.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "synswap/errors.hpp"

namespace synswap::polarization {

using Cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr int kMaxQubits = 4;
inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kTraceTolerance = 1e-12;
inline constexpr double kEigenvalueFloor = -1e-10;
inline constexpr double kNullProbability = 1e-15;

inline double deg_to_rad(double degrees) { return degrees * std::numbers::pi / 180.0; }

namespace detail {

inline int qubits_for_dimension(Eigen::Index dim) {
    for (int n = 1; n <= kMaxQubits; ++n) {
        if (Eigen::Index{1} << n == dim) {
            return n;
        }
    }
    throw ValidationError("dimension " + std::to_string(dim) + " is not 2^n for n in 1.." +
                          std::to_string(kMaxQubits));
}

inline int bit_of(Eigen::Index index, int qubit, int n_qubits) {
    return static_cast<int>((index >> (n_qubits - 1 - qubit)) & 1);
}

inline double max_abs(const Matrix &m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline Matrix hermitian_part(const Matrix &m) { return 0.5 * (m + m.adjoint()); }

inline Eigen::VectorXd eigenvalues(const Matrix &hermitian) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

/// Principal square root of a positive semidefinite operator.
inline Matrix psd_sqrt(const Matrix &hermitian) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian);
    const Eigen::VectorXd root = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return solver.eigenvectors() * root.asDiagonal() * solver.eigenvectors().adjoint();
}

inline void check_qubit_list(std::span<const int> qubits, int n_qubits, const char *what) {
    for (std::size_t i = 0; i < qubits.size(); ++i) {
        if (qubits[i] < 0 || qubits[i] >= n_qubits) {
            throw ValidationError(std::string(what) + ": qubit " + std::to_string(qubits[i]) +
                                  " out of range for " + std::to_string(n_qubits) + " qubits");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (qubits[j] == qubits[i]) {
                throw ValidationError(std::string(what) + ": repeated qubit " +
                                      std::to_string(qubits[i]));
            }
        }
    }
}

} // namespace detail

/// Normalized state vector on 1..4 qubits.
class PureState {
  public:
    explicit PureState(Vector amplitudes) : amplitudes_(std::move(amplitudes)) {
        n_qubits_ = detail::qubits_for_dimension(amplitudes_.size());
        if (!amplitudes_.allFinite()) {
            throw ValidationError("pure state has non-finite amplitudes");
        }
        if (std::abs(amplitudes_.squaredNorm() - 1.0) > kNormTolerance) {
            throw ValidationError("pure state norm^2 " + std::to_string(amplitudes_.squaredNorm()) +
                                  " differs from 1");
        }
    }

    /// Scales an arbitrary nonzero vector to unit norm.
    static PureState normalized(Vector amplitudes) {
        const double norm = amplitudes.norm();
        if (!(norm > 0.0)) {
            throw ValidationError("cannot normalize a zero vector");
        }
        return PureState(amplitudes / norm);
    }

    int n_qubits() const noexcept { return n_qubits_; }
    Eigen::Index dim() const noexcept { return amplitudes_.size(); }
    const Vector &amplitudes() const noexcept { return amplitudes_; }
    Cplx operator[](Eigen::Index i) const { return amplitudes_[i]; }

    Matrix projector() const { return amplitudes_ * amplitudes_.adjoint(); }

  private:
    int n_qubits_ = 0;
    Vector amplitudes_;
};

/// Hermitian, unit-trace, positive semidefinite operator on 1..4 qubits.
///
/// Construction validates all three properties, so every DensityMatrix that
/// exists satisfies them to the library tolerances.
class DensityMatrix {
  public:
    explicit DensityMatrix(Matrix entries) : entries_(std::move(entries)) {
        if (entries_.rows() != entries_.cols()) {
            throw ValidationError("density matrix must be square");
        }
        n_qubits_ = detail::qubits_for_dimension(entries_.rows());
        if (!entries_.allFinite()) {
            throw ValidationError("density matrix has non-finite entries");
        }
        const double asym = detail::max_abs(entries_ - entries_.adjoint());
        if (asym > kHermitianTolerance) {
            throw ValidationError("density matrix not Hermitian (deviation " + std::to_string(asym) +
                                  ")");
        }
        const double trace_err = std::abs(entries_.trace() - Cplx{1.0, 0.0});
        if (trace_err > kTraceTolerance) {
            throw ValidationError("density matrix trace differs from 1 by " +
                                  std::to_string(trace_err));
        }
        const double min_eig = detail::eigenvalues(detail::hermitian_part(entries_)).minCoeff();
        if (min_eig < kEigenvalueFloor) {
            throw ValidationError("density matrix has negative eigenvalue " + std::to_string(min_eig));
        }
    }

    explicit DensityMatrix(const PureState &psi) : DensityMatrix(psi.projector()) {}

    /// Hermitizes and rescales to unit trace before validating. For results
    /// of composed operations carrying round-off.
    static DensityMatrix normalized(const Matrix &m) {
        Matrix h = detail::hermitian_part(m);
        const double trace = h.trace().real();
        if (!(trace > 0.0)) {
            throw ValidationError("cannot normalize operator with non-positive trace");
        }
        return DensityMatrix(h / trace);
    }

    static DensityMatrix maximally_mixed(int n_qubits) {
        if (n_qubits < 1 || n_qubits > kMaxQubits) {
            throw ValidationError("qubit count out of range");
        }
        const Eigen::Index dim = Eigen::Index{1} << n_qubits;
        return DensityMatrix(Matrix::Identity(dim, dim) / static_cast<double>(dim));
    }

    int n_qubits() const noexcept { return n_qubits_; }
    Eigen::Index dim() const noexcept { return entries_.rows(); }
    const Matrix &matrix() const noexcept { return entries_; }
    Cplx operator()(Eigen::Index r, Eigen::Index c) const { return entries_(r, c); }

    double trace() const { return entries_.trace().real(); }
    double purity() const { return (entries_ * entries_).trace().real(); }
    Eigen::VectorXd eigenvalues() const { return detail::eigenvalues(entries_); }

  private:
    int n_qubits_ = 0;
    Matrix entries_;
};

enum class BellState { PsiPlus, PsiMinus, PhiPlus, PhiMinus };

inline constexpr std::array<BellState, 4> kBellStates = {BellState::PsiPlus, BellState::PsiMinus,
                                                         BellState::PhiPlus, BellState::PhiMinus};

inline std::string to_string(BellState b) {
    switch (b) {
    case BellState::PsiPlus:
        return "Psi+";
    case BellState::PsiMinus:
        return "Psi-";
    case BellState::PhiPlus:
        return "Phi+";
    case BellState::PhiMinus:
        return "Phi-";
    }
    return "?";
}

/// |Psi+-> = (|HV> +- |VH>)/sqrt2, |Phi+-> = (|HH> +- |VV>)/sqrt2.
inline PureState bell_state(BellState kind) {
    const double r = (1.0 / std::numbers::sqrt2);
    Vector a = Vector::Zero(4);
    switch (kind) {
    case BellState::PsiPlus:
        a[1] = r;
        a[2] = r;
        break;
    case BellState::PsiMinus:
        a[1] = r;
        a[2] = -r;
        break;
    case BellState::PhiPlus:
        a[0] = r;
        a[3] = r;
        break;
    case BellState::PhiMinus:
        a[0] = r;
        a[3] = -r;
        break;
    }
    return PureState(std::move(a));
}

inline PureState singlet() { return bell_state(BellState::PsiMinus); }

/// Single-photon state cos(theta)|H> + sin(theta)|V>.
inline PureState linear_polarization(double angle_deg) {
    const double t = deg_to_rad(angle_deg);
    Vector a(2);
    a << std::cos(t), std::sin(t);
    return PureState::normalized(std::move(a));
}

/// Product state of single-photon basis kets, e.g. basis_state("HVVH").
inline PureState basis_state(const std::string &labels) {
    const int n = static_cast<int>(labels.size());
    if (n < 1 || n > kMaxQubits) {
        throw ValidationError("basis label must name 1.." + std::to_string(kMaxQubits) + " photons");
    }
    Eigen::Index index = 0;
    for (char c : labels) {
        if (c != 'H' && c != 'V') {
            throw ValidationError(std::string("unknown polarization label '") + c + "'");
        }
        index = (index << 1) | (c == 'V' ? 1 : 0);
    }
    Vector a = Vector::Zero(Eigen::Index{1} << n);
    a[index] = 1.0;
    return PureState(std::move(a));
}

inline Matrix kron(const Matrix &a, const Matrix &b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

inline PureState tensor(const PureState &a, const PureState &b) {
    if (a.n_qubits() + b.n_qubits() > kMaxQubits) {
        throw ValidationError("tensor product exceeds " + std::to_string(kMaxQubits) + " qubits");
    }
    return PureState::normalized(kron(a.amplitudes(), b.amplitudes()));
}

inline DensityMatrix tensor(const DensityMatrix &a, const DensityMatrix &b) {
    if (a.n_qubits() + b.n_qubits() > kMaxQubits) {
        throw ValidationError("tensor product exceeds " + std::to_string(kMaxQubits) + " qubits");
    }
    return DensityMatrix::normalized(kron(a.matrix(), b.matrix()));
}

/// Lifts an operator acting on `targets` (in the listed order) to the full
/// n-qubit space, acting as identity elsewhere.
inline Matrix embed(const Matrix &op, std::span<const int> targets, int n_qubits) {
    const int k = static_cast<int>(targets.size());
    if (op.rows() != op.cols() || op.rows() != (Eigen::Index{1} << k)) {
        throw ValidationError("operator dimension does not match target qubit count");
    }
    detail::check_qubit_list(targets, n_qubits, "embed");
    const Eigen::Index dim = Eigen::Index{1} << n_qubits;
    Eigen::Index target_mask = 0;
    for (int q : targets) {
        target_mask |= Eigen::Index{1} << (n_qubits - 1 - q);
    }
    auto sub_index = [&](Eigen::Index full) {
        Eigen::Index s = 0;
        for (int q : targets) {
            s = (s << 1) | detail::bit_of(full, q, n_qubits);
        }
        return s;
    };
    Matrix out = Matrix::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) {
            if ((i & ~target_mask) == (j & ~target_mask)) {
                out(i, j) = op(sub_index(i), sub_index(j));
            }
        }
    }
    return out;
}

inline Matrix embed(const Matrix &op, std::initializer_list<int> targets, int n_qubits) {
    return embed(op, std::span<const int>(targets.begin(), targets.size()), n_qubits);
}

/// Reduced state on `keep` (result ordered by ascending qubit index).
inline DensityMatrix partial_trace(const DensityMatrix &rho, std::span<const int> keep) {
    if (keep.empty()) {
        throw ValidationError("partial_trace: keep set is empty");
    }
    const int n = rho.n_qubits();
    detail::check_qubit_list(keep, n, "partial_trace");
    std::vector<int> kept(keep.begin(), keep.end());
    std::sort(kept.begin(), kept.end());
    const int k = static_cast<int>(kept.size());

    Eigen::Index keep_mask = 0;
    for (int q : kept) {
        keep_mask |= Eigen::Index{1} << (n - 1 - q);
    }
    auto sub_index = [&](Eigen::Index full) {
        Eigen::Index s = 0;
        for (int q : kept) {
            s = (s << 1) | detail::bit_of(full, q, n);
        }
        return s;
    };
    const Eigen::Index dim = rho.dim();
    Matrix out = Matrix::Zero(Eigen::Index{1} << k, Eigen::Index{1} << k);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) {
            if ((i & ~keep_mask) == (j & ~keep_mask)) {
                out(sub_index(i), sub_index(j)) += rho(i, j);
            }
        }
    }
    return DensityMatrix::normalized(out);
}

inline DensityMatrix partial_trace(const DensityMatrix &rho, std::initializer_list<int> keep) {
    return partial_trace(rho, std::span<const int>(keep.begin(), keep.size()));
}

/// v |Psi-><Psi-| + (1 - v) 1/4.
inline DensityMatrix werner(double v) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw ValidationError("werner parameter " + std::to_string(v) + " outside [0, 1]");
    }
    const Matrix id = Matrix::Identity(4, 4);
    return DensityMatrix::normalized(v * singlet().projector() + (1.0 - v) * id / 4.0);
}

struct Projection {
    double probability;
    DensityMatrix state;
};

/// Applies a POVM effect 0 <= E <= 1 (full-space operator): p = Tr(E rho),
/// conditional state sqrt(E) rho sqrt(E) / p.
/// Throws NullOutcomeError when p < 1e-15.
inline Projection measure_project(const DensityMatrix &rho, const Matrix &effect) {
    if (effect.rows() != rho.dim() || effect.cols() != rho.dim()) {
        throw ValidationError("effect dimension does not match state");
    }
    if (detail::max_abs(effect - effect.adjoint()) > 1e-10) {
        throw ValidationError("effect is not Hermitian");
    }
    const Matrix e = detail::hermitian_part(effect);
    const Eigen::VectorXd ev = detail::eigenvalues(e);
    if (ev.minCoeff() < kEigenvalueFloor || ev.maxCoeff() > 1.0 - kEigenvalueFloor) {
        throw ValidationError("effect eigenvalues outside [0, 1]");
    }
    const double p = (e * rho.matrix()).trace().real();
    if (p < kNullProbability) {
        throw NullOutcomeError(p);
    }
    const Matrix root = detail::psd_sqrt(e);
    return {p, DensityMatrix::normalized(root * rho.matrix() * root / p)};
}

/// Same as above with the effect acting on `targets` only.
inline Projection measure_project(const DensityMatrix &rho, const Matrix &effect,
                                  std::span<const int> targets) {
    return measure_project(rho, embed(effect, targets, rho.n_qubits()));
}

inline Projection measure_project(const DensityMatrix &rho, const Matrix &effect,
                                  std::initializer_list<int> targets) {
    return measure_project(rho, effect, std::span<const int>(targets.begin(), targets.size()));
}

enum class Outcome { Transmit, Reflect };

/// Ideal linear polarizer (or one output port of a PBS) at `angle_deg`.
struct PolarizerSetting {
    double angle_deg = 0.0;
    Outcome outcome = Outcome::Transmit;

    Matrix projector() const {
        const Matrix transmit = linear_polarization(angle_deg).projector();
        return outcome == Outcome::Transmit ? transmit : Matrix(Matrix::Identity(2, 2) - transmit);
    }
};

/// Joint outcome probability of two polarizers on a two-photon state.
inline double joint_probability(const DensityMatrix &rho, const PolarizerSetting &a,
                                const PolarizerSetting &b) {
    if (rho.n_qubits() != 2) {
        throw ValidationError("joint_probability needs a two-photon state");
    }
    const double p = (kron(a.projector(), b.projector()) * rho.matrix()).trace().real();
    return std::max(0.0, p);
}

/// Outcome probabilities (tt, tr, rt, rr) for analyzers at angles a and b.
inline std::array<double, 4> outcome_probabilities(const DensityMatrix &rho, double theta_a_deg,
                                                   double theta_b_deg) {
    const PolarizerSetting at{theta_a_deg, Outcome::Transmit}, ar{theta_a_deg, Outcome::Reflect};
    const PolarizerSetting bt{theta_b_deg, Outcome::Transmit}, br{theta_b_deg, Outcome::Reflect};
    return {joint_probability(rho, at, bt), joint_probability(rho, at, br),
            joint_probability(rho, ar, bt), joint_probability(rho, ar, br)};
}

/// E = P(t,t) + P(r,r) - P(t,r) - P(r,t).
inline double correlation_E(const DensityMatrix &rho, double theta_a_deg, double theta_b_deg) {
    const auto p = outcome_probabilities(rho, theta_a_deg, theta_b_deg);
    return std::clamp(p[0] + p[3] - p[1] - p[2], -1.0, 1.0);
}

/// <phi| rho |phi>.
inline double fidelity_to_pure(const DensityMatrix &rho, const PureState &phi) {
    if (rho.dim() != phi.dim()) {
        throw ValidationError("fidelity: dimension mismatch");
    }
    const double f = (phi.amplitudes().adjoint() * rho.matrix() * phi.amplitudes())(0, 0).real();
    return std::clamp(f, 0.0, 1.0);
}

/// Coefficients of a four-photon state in the product Bell basis of the
/// pairs (1,4) and (2,3): c[4*i + j] = (<B_i|_14 <B_j|_23) |psi>, with i, j
/// indexing kBellStates.
class BellDecomposition {
  public:
    explicit BellDecomposition(std::array<Cplx, 16> c) : coefficients_(c) {}

    Cplx coefficient(BellState pair14, BellState pair23) const {
        return coefficients_[4 * static_cast<int>(pair14) + static_cast<int>(pair23)];
    }
    const std::array<Cplx, 16> &coefficients() const noexcept { return coefficients_; }

  private:
    std::array<Cplx, 16> coefficients_;
};

/// The vector |B_i>_14 |B_j>_23 in the standard 1234 ordering.
inline Vector bell_product_14_23(BellState pair14, BellState pair23) {
    const Vector b14 = bell_state(pair14).amplitudes();
    const Vector b23 = bell_state(pair23).amplitudes();
    Vector out = Vector::Zero(16);
    for (int q1 = 0; q1 < 2; ++q1) {
        for (int q2 = 0; q2 < 2; ++q2) {
            for (int q3 = 0; q3 < 2; ++q3) {
                for (int q4 = 0; q4 < 2; ++q4) {
                    out[(q1 << 3) | (q2 << 2) | (q3 << 1) | q4] =
                        b14[(q1 << 1) | q4] * b23[(q2 << 1) | q3];
                }
            }
        }
    }
    return out;
}

inline BellDecomposition bell_decompose_14_23(const PureState &state) {
    if (state.n_qubits() != 4) {
        throw ValidationError("bell_decompose_14_23 needs a four-photon state");
    }
    std::array<Cplx, 16> c{};
    for (BellState b14 : kBellStates) {
        for (BellState b23 : kBellStates) {
            c[4 * static_cast<int>(b14) + static_cast<int>(b23)] =
                bell_product_14_23(b14, b23).dot(state.amplitudes());
        }
    }
    return BellDecomposition(c);
}

/// Inverse of bell_decompose_14_23.
inline Vector bell_reconstruct_14_23(const BellDecomposition &d) {
    Vector out = Vector::Zero(16);
    for (BellState b14 : kBellStates) {
        for (BellState b23 : kBellStates) {
            out += d.coefficient(b14, b23) * bell_product_14_23(b14, b23);
        }
    }
    return out;
}

} // namespace synswap::polarization
