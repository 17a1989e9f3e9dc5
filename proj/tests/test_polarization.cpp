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

#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "synswap/polarization.hpp"
#include "test_util.hpp"

using namespace synswap;
using namespace synswap::polarization;

namespace {

constexpr double kTol = 1e-12;
const double kHalfRoot2 = 1.0 / std::numbers::sqrt2;

PureState two_singlets() { return tensor(singlet(), singlet()); }

void expect_valid(const DensityMatrix &rho) {
    const Matrix &m = rho.matrix();
    EXPECT_LT((m - m.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(rho.trace(), 1.0, 1e-12);
    EXPECT_GT(rho.eigenvalues().minCoeff(), -1e-10);
}

double max_dev(const Matrix &a, const Matrix &b) { return (a - b).cwiseAbs().maxCoeff(); }

} // namespace

TEST(BellState, AmplitudeConventions) {
    const PureState psi_minus = bell_state(BellState::PsiMinus);
    EXPECT_NEAR(psi_minus[0].real(), 0.0, kTol);
    EXPECT_NEAR(psi_minus[1].real(), kHalfRoot2, kTol);
    EXPECT_NEAR(psi_minus[2].real(), -kHalfRoot2, kTol);
    EXPECT_NEAR(psi_minus[3].real(), 0.0, kTol);

    const PureState phi_plus = bell_state(BellState::PhiPlus);
    EXPECT_NEAR(phi_plus[0].real(), kHalfRoot2, kTol);
    EXPECT_NEAR(phi_plus[3].real(), kHalfRoot2, kTol);
}

TEST(BellState, Orthonormal) {
    for (BellState a : kBellStates) {
        for (BellState b : kBellStates) {
            const Cplx ip = bell_state(a).amplitudes().dot(bell_state(b).amplitudes());
            EXPECT_NEAR(std::abs(ip), a == b ? 1.0 : 0.0, kTol) << to_string(a) << " " << to_string(b);
        }
    }
}

TEST(PureState, RejectsUnnormalizedAndOddDimensions) {
    EXPECT_THROW(PureState(Vector::Ones(4)), ValidationError);
    EXPECT_THROW(PureState(Vector::Zero(3)), ValidationError);
    EXPECT_THROW(PureState::normalized(Vector::Zero(2)), ValidationError);
    EXPECT_THROW(basis_state("HVX"), ValidationError);
    EXPECT_THROW(basis_state("HVHVH"), ValidationError);
}

TEST(DensityMatrix, RejectsInvalidOperators) {
    Matrix not_hermitian = Matrix::Identity(2, 2) / 2.0;
    not_hermitian(0, 1) = 0.1;
    EXPECT_THROW(DensityMatrix{not_hermitian}, ValidationError);
    EXPECT_THROW(DensityMatrix{Matrix(Matrix::Identity(2, 2))}, ValidationError);
    Matrix negative = Matrix::Zero(2, 2);
    negative(0, 0) = 1.5;
    negative(1, 1) = -0.5;
    EXPECT_THROW(DensityMatrix{negative}, ValidationError);
}

TEST(Tensor, MixedTimesMixedIsMixed) {
    const DensityMatrix m = tensor(DensityMatrix::maximally_mixed(1), DensityMatrix::maximally_mixed(1));
    EXPECT_LT(max_dev(m.matrix(), Matrix::Identity(4, 4) / 4.0), kTol);
}

TEST(Tensor, SingletTimesSingletIsRankOneProjector) {
    const DensityMatrix rho = tensor(DensityMatrix(singlet()), DensityMatrix(singlet()));
    EXPECT_EQ(rho.n_qubits(), 4);
    EXPECT_NEAR(rho.trace(), 1.0, kTol);
    EXPECT_NEAR(rho.purity(), 1.0, kTol);
    EXPECT_LT(max_dev(rho.matrix() * rho.matrix(), rho.matrix()), kTol);
    const Eigen::VectorXd ev = rho.eigenvalues();
    EXPECT_NEAR(ev.maxCoeff(), 1.0, kTol);
    EXPECT_NEAR(ev.sum() - ev.maxCoeff(), 0.0, 1e-10);
}

TEST(Tensor, RejectsMoreThanFourQubits) {
    const DensityMatrix four = DensityMatrix::maximally_mixed(4);
    EXPECT_THROW(tensor(four, DensityMatrix::maximally_mixed(1)), ValidationError);
}

TEST(BellDecomposition, TwoSingletsRearrangeIntoMatchedPairs) {
    const BellDecomposition d = bell_decompose_14_23(two_singlets());
    for (BellState b14 : kBellStates) {
        for (BellState b23 : kBellStates) {
            const double mag = std::abs(d.coefficient(b14, b23));
            EXPECT_NEAR(mag, b14 == b23 ? 0.5 : 0.0, kTol) << to_string(b14) << to_string(b23);
        }
    }
    // Signs under the fixed amplitude conventions.
    EXPECT_NEAR(d.coefficient(BellState::PsiPlus, BellState::PsiPlus).real(), 0.5, kTol);
    EXPECT_NEAR(d.coefficient(BellState::PsiMinus, BellState::PsiMinus).real(), -0.5, kTol);
    EXPECT_NEAR(d.coefficient(BellState::PhiPlus, BellState::PhiPlus).real(), -0.5, kTol);
    EXPECT_NEAR(d.coefficient(BellState::PhiMinus, BellState::PhiMinus).real(), 0.5, kTol);
}

TEST(BellDecomposition, AllHorizontalOnlyTouchesPhiPairs) {
    const BellDecomposition d = bell_decompose_14_23(basis_state("HHHH"));
    double total = 0.0;
    for (BellState b14 : kBellStates) {
        for (BellState b23 : kBellStates) {
            const double w = std::norm(d.coefficient(b14, b23));
            total += w;
            const bool phi_pair = (b14 == BellState::PhiPlus || b14 == BellState::PhiMinus) &&
                                  (b23 == BellState::PhiPlus || b23 == BellState::PhiMinus);
            if (!phi_pair) {
                EXPECT_NEAR(w, 0.0, kTol);
            }
        }
    }
    EXPECT_NEAR(total, 1.0, kTol);
}

TEST(BellDecomposition, ReconstructionIsIdentityForRandomStates) {
    Rng rng(2024);
    for (int i = 0; i < 100; ++i) {
        const PureState psi = testutil::random_pure_state(4, rng);
        const BellDecomposition d = bell_decompose_14_23(psi);
        double weight = 0.0;
        for (const Cplx &c : d.coefficients()) {
            weight += std::norm(c);
        }
        EXPECT_NEAR(weight, 1.0, kTol);
        EXPECT_LT((bell_reconstruct_14_23(d) - psi.amplitudes()).cwiseAbs().maxCoeff(), kTol);
    }
}

TEST(BellDecomposition, NeedsFourQubits) {
    EXPECT_THROW(bell_decompose_14_23(singlet()), ValidationError);
}

TEST(PartialTrace, SingletMarginalIsMaximallyMixed) {
    const DensityMatrix r = partial_trace(DensityMatrix(singlet()), {0});
    EXPECT_LT(max_dev(r.matrix(), Matrix::Identity(2, 2) / 2.0), kTol);
}

TEST(PartialTrace, PhotonsOneAndThreeAreUncorrelated) {
    const DensityMatrix r = partial_trace(DensityMatrix(two_singlets()), {0, 2});
    EXPECT_LT(max_dev(r.matrix(), Matrix::Identity(4, 4) / 4.0), kTol);
}

TEST(PartialTrace, EverySinglePhotonIsMaximallyMixed) {
    const DensityMatrix rho(two_singlets());
    for (int q = 0; q < 4; ++q) {
        const DensityMatrix r = partial_trace(rho, {q});
        EXPECT_LT(max_dev(r.matrix(), Matrix::Identity(2, 2) / 2.0), kTol) << "photon " << q + 1;
    }
}

TEST(PartialTrace, ProductStateReturnsFactor) {
    Rng rng(7);
    const DensityMatrix b = testutil::random_density_matrix(1, rng);
    const DensityMatrix rho = tensor(DensityMatrix(basis_state("H")), b);
    EXPECT_LT(max_dev(partial_trace(rho, {1}).matrix(), b.matrix()), kTol);
}

TEST(PartialTrace, Errors) {
    const DensityMatrix rho = DensityMatrix::maximally_mixed(2);
    EXPECT_THROW(partial_trace(rho, std::span<const int>{}), ValidationError);
    EXPECT_THROW(partial_trace(rho, {2}), ValidationError);
    EXPECT_THROW(partial_trace(rho, {0, 0}), ValidationError);
}

TEST(Werner, Endpoints) {
    EXPECT_LT(max_dev(werner(1.0).matrix(), singlet().projector()), kTol);
    EXPECT_LT(max_dev(werner(0.0).matrix(), Matrix::Identity(4, 4) / 4.0), kTol);
    EXPECT_THROW(werner(-0.01), ValidationError);
    EXPECT_THROW(werner(1.01), ValidationError);
}

TEST(Werner, FortyFiveDegreeVisibility) {
    EXPECT_NEAR(-correlation_E(werner(0.9), 45.0, 45.0), 0.9, kTol);
}

TEST(MeasureProject, SingletOnItsOwnProjector) {
    const auto r = measure_project(DensityMatrix(singlet()), singlet().projector());
    EXPECT_NEAR(r.probability, 1.0, kTol);
    EXPECT_LT(max_dev(r.state.matrix(), singlet().projector()), kTol);
}

TEST(MeasureProject, MixedStateHeraldsSinglet) {
    const auto r = measure_project(DensityMatrix::maximally_mixed(2), singlet().projector());
    EXPECT_NEAR(r.probability, 0.25, kTol);
    EXPECT_LT(max_dev(r.state.matrix(), singlet().projector()), kTol);
}

TEST(MeasureProject, SingletOnMiddlePhotonsSwapsEntanglement) {
    const auto r = measure_project(DensityMatrix(two_singlets()), singlet().projector(), {1, 2});
    EXPECT_NEAR(r.probability, 0.25, kTol);
    const DensityMatrix rho14 = partial_trace(r.state, {0, 3});
    EXPECT_NEAR(fidelity_to_pure(rho14, singlet()), 1.0, kTol);
}

TEST(MeasureProject, NullOutcome) {
    const DensityMatrix hh(basis_state("HH"));
    EXPECT_THROW(measure_project(hh, singlet().projector()), NullOutcomeError);
}

TEST(MeasureProject, RejectsNonEffects) {
    const DensityMatrix rho = DensityMatrix::maximally_mixed(2);
    EXPECT_THROW(measure_project(rho, Matrix(2.0 * Matrix::Identity(4, 4))), ValidationError);
    EXPECT_THROW(measure_project(rho, Matrix(Matrix::Identity(2, 2))), ValidationError);
}

TEST(MeasureProject, CompletePovmSumsToOne) {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const DensityMatrix rho = testutil::random_density_matrix(2, rng);
        double total = 0.0;
        for (BellState b : kBellStates) {
            total += measure_project(rho, bell_state(b).projector()).probability;
        }
        EXPECT_NEAR(total, 1.0, kTol);

        // A non-projective POVM: polarizer outcomes mixed with a coin.
        const Matrix t = kron(linear_polarization(30.0).projector(), Matrix::Identity(2, 2));
        const Matrix e1 = 0.3 * t + 0.2 * Matrix::Identity(4, 4);
        const Matrix e2 = Matrix::Identity(4, 4) - e1;
        EXPECT_NEAR(measure_project(rho, e1).probability + measure_project(rho, e2).probability, 1.0,
                    kTol);
    }
}

TEST(MeasureProject, EmittedStatesAreValid) {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const DensityMatrix rho = testutil::random_density_matrix(4, rng);
        const Matrix e = 0.7 * singlet().projector() + 0.1 * Matrix::Identity(4, 4);
        const auto r = measure_project(rho, e, {1, 2});
        expect_valid(r.state);
        expect_valid(partial_trace(r.state, {0, 3}));
    }
}

TEST(Correlation, SingletIsMinusCosineOnGrid) {
    const DensityMatrix s(singlet());
    for (int i = 0; i < 19; ++i) {
        for (int j = 0; j < 19; ++j) {
            const double a = -90.0 + 10.0 * i;
            const double b = -90.0 + 10.0 * j;
            EXPECT_NEAR(correlation_E(s, a, b), -std::cos(2.0 * deg_to_rad(a - b)), kTol);
        }
    }
}

TEST(Correlation, ChshSettingValues) {
    EXPECT_NEAR(correlation_E(DensityMatrix(singlet()), -22.5, 0.0), -0.70710678118654757, 1e-12);
    const double e = correlation_E(werner(0.82), -22.5, 0.0);
    EXPECT_NEAR(e, 0.82 * -0.70710678118654757, 1e-12);
    EXPECT_NEAR(e, -0.5798, 1e-4);
    // Measured -0.570 +- 0.049 brackets the prediction.
    EXPECT_LT(std::abs(e - -0.570), 0.049);
}

TEST(Fidelity, KnownValues) {
    EXPECT_NEAR(fidelity_to_pure(DensityMatrix(singlet()), singlet()), 1.0, kTol);
    EXPECT_NEAR(fidelity_to_pure(DensityMatrix::maximally_mixed(2), singlet()), 0.25, kTol);
    EXPECT_NEAR(fidelity_to_pure(werner(0.9), singlet()), 0.925, kTol);
    EXPECT_THROW(fidelity_to_pure(DensityMatrix::maximally_mixed(1), singlet()), ValidationError);
}

TEST(Embed, MatchesKroneckerForAdjacentQubits) {
    const Matrix op = singlet().projector();
    const Matrix full = embed(op, {1, 2}, 4);
    const Matrix id2 = Matrix::Identity(2, 2);
    EXPECT_LT(max_dev(full, kron(kron(id2, op), id2)), kTol);
}
