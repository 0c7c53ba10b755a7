#include <gtest/gtest.h>

#include <cmath>

#include "qcma/marked_oracle.hpp"
#include "qcma/measures.hpp"

namespace qcma {
namespace {

ComplexVector joint_basis_superposition(Eigen::Index dim, Eigen::Index i, Eigen::Index j) {
  ComplexVector v = ComplexVector::Zero(dim);
  v(i) = v(j) = 1.0 / std::sqrt(2.0);
  return v;
}

TEST(MarkedStateOracle, Examples) {
  const auto psi = haar_sample<double>(4, RngSeed{1});
  MarkedStateOracle u(psi);
  EXPECT_LT((apply_marked(u, psi).amplitudes() + psi.amplitudes()).norm(), 1e-12);

  const auto other = haar_sample<double>(4, RngSeed{2});
  const auto orth = PureState::normalized(other.amplitudes() - psi.amplitudes().dot(other.amplitudes()) * psi.amplitudes());
  EXPECT_LT(distance(apply_marked(u, orth), orth), 1e-12);

  MarkedStateOracle zero(PureState::basis(1, 0));
  const auto out = apply_marked(zero, PureState::uniform(1));
  EXPECT_NEAR(out[0].real(), -1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(out[1].real(), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_EQ(zero.queries(), 1u);
  EXPECT_THROW(apply_marked(u, PureState::basis(3, 0)), DimensionError);
}

TEST(MarkedStateOracle, MatchesDenseReflectionAndIsSelfInverse) {
  CounterRng rng(RngSeed{3});
  const auto psi = haar_sample<double>(5, rng);
  MarkedStateOracle u(psi);
  const ComplexMatrix dense =
      ComplexMatrix::Identity(32, 32) - 2.0 * psi.amplitudes() * psi.amplitudes().adjoint();
  for (int i = 0; i < 100; ++i) {
    const auto phi = haar_sample<double>(5, rng);
    const auto once = u.apply(phi);
    EXPECT_LT((once.amplitudes() - dense * phi.amplitudes()).norm(), 1e-12);
    EXPECT_NEAR(once.amplitudes().norm(), 1.0, 1e-10);
    EXPECT_LT(distance(u.apply(once), phi), 1e-10);
  }
  EXPECT_EQ(u.queries(), 200u);
  EXPECT_NEAR(*u.marked_overlap(psi), 1.0, 1e-12);
}

TEST(MarkedStateOracle, ControlledExamples) {
  const auto psi = haar_sample<double>(3, RngSeed{4});
  MarkedStateOracle u(psi);
  // Register is the low 3 qubits, control is qubit 3.
  const auto off = tensor(PureState::basis(1, 0), psi);
  EXPECT_LT(distance(apply_controlled(u, off, 3), off), 1e-15);

  const auto on = tensor(PureState::basis(1, 1), psi);
  EXPECT_LT((apply_controlled(u, on, 3).amplitudes() + on.amplitudes()).norm(), 1e-12);

  const auto plus = tensor(PureState::uniform(1), psi);
  ComplexVector minus(2);
  minus << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
  const auto expected = tensor(PureState(minus), psi);
  EXPECT_LT(distance(apply_controlled(u, plus, 3), expected), 1e-12);
  EXPECT_EQ(u.queries(), 3u);

  EXPECT_THROW(apply_controlled(u, psi, 3), DimensionError);
  EXPECT_THROW(apply_controlled(u, plus, 1), DimensionError);
}

TEST(MarkedStateOracle, ControlledMatchesDenseBlockMatrix) {
  CounterRng rng(RngSeed{5});
  const auto psi = haar_sample<double>(3, rng);
  MarkedStateOracle u(psi);
  const ComplexMatrix reflection = ComplexMatrix::Identity(8, 8) - 2.0 * psi.amplitudes() * psi.amplitudes().adjoint();
  // Joint qubits: register 0..2, spectator 3, control 4.
  ComplexMatrix dense = ComplexMatrix::Identity(32, 32);
  for (int spectator = 0; spectator < 2; ++spectator) {
    const Eigen::Index base = 16 + 8 * spectator;
    dense.block(base, base, 8, 8) = reflection;
  }
  for (int i = 0; i < 20; ++i) {
    const auto joint = haar_sample<double>(5, rng);
    EXPECT_LT((apply_controlled(u, joint, 4).amplitudes() - dense * joint.amplitudes()).norm(), 1e-12);
  }
}

TEST(MarkedStateOracle, ApplyOnRegisterActsOnEveryBranch) {
  const auto psi = haar_sample<double>(2, RngSeed{6});
  MarkedStateOracle u(psi);
  const auto joint = haar_sample<double>(4, RngSeed{7});
  const auto out = u.apply_on_register(joint);
  for (Eigen::Index col = 0; col < 4; ++col) {
    const ComplexVector in = joint.amplitudes().segment(4 * col, 4);
    const ComplexVector want = in - 2.0 * psi.amplitudes().dot(in) * psi.amplitudes();
    EXPECT_LT((out.amplitudes().segment(4 * col, 4) - want).norm(), 1e-12);
  }
}

TEST(IdentityOracle, CountsAndFixesEverything) {
  IdentityOracle id(3);
  const auto phi = haar_sample<double>(3, RngSeed{8});
  EXPECT_LT(distance(id.apply(phi), phi), 1e-15);
  const auto joint = haar_sample<double>(4, RngSeed{9});
  EXPECT_LT(distance(id.apply_controlled(joint, 3), joint), 1e-15);
  EXPECT_EQ(id.queries(), 2u);
  EXPECT_FALSE(id.marked_overlap(phi).has_value());
}

TEST(QpolyOracle, Examples) {
  const auto advice = haar_sample<double>(2, RngSeed{10});
  CounterRng rng(RngSeed{11});

  QpolyOracle zero_lang(advice, std::vector<bool>(4, false));
  for (int i = 0; i < 5; ++i) {
    const auto joint = haar_sample<double>(4, rng);
    EXPECT_LT(distance(apply_qpoly(zero_lang, joint), joint), 1e-12);
  }

  std::vector<bool> lang = {false, true, true, false};
  QpolyOracle q(advice, lang);
  for (std::uint64_t x = 0; x < 4; ++x) {
    const auto in = tensor(PureState::basis(2, x), advice);
    const auto out = apply_qpoly(q, in);
    const double sign = lang[x] ? -1.0 : 1.0;
    EXPECT_LT((out.amplitudes() - sign * in.amplitudes()).norm(), 1e-12);
  }

  const auto other = haar_sample<double>(2, RngSeed{12});
  const auto orth =
      PureState::normalized(other.amplitudes() - advice.amplitudes().dot(other.amplitudes()) * advice.amplitudes());
  const auto in = tensor(PureState::basis(2, 1), orth);
  EXPECT_LT(distance(apply_qpoly(q, in), in), 1e-12);
  EXPECT_EQ(q.queries(), 5u);

  EXPECT_THROW(apply_qpoly(q, haar_sample<double>(3, rng)), DimensionError);
  EXPECT_THROW(QpolyOracle(advice, std::vector<bool>(3, false)), DimensionError);
}

TEST(QpolyOracle, UnitaryAndSelfInverseOnRandomInputs) {
  CounterRng rng(RngSeed{13});
  const auto advice = haar_sample<double>(3, rng);
  std::vector<bool> lang(8);
  for (int x = 0; x < 8; ++x) lang[x] = rng.below(2);
  QpolyOracle q(advice, lang);
  for (int i = 0; i < 100; ++i) {
    const auto joint = haar_sample<double>(6, rng);
    const auto out = q.apply(joint);
    EXPECT_NEAR(out.amplitudes().norm(), 1.0, 1e-10);
    EXPECT_LT(distance(q.apply(out), joint), 1e-10);
  }
  EXPECT_EQ(q.queries(), 200u);
}

TEST(RegisterOracle, ControlledOnSuperpositionOfBasisStates) {
  MarkedStateOracle u(PureState::basis(1, 1));
  // (|0>|1> + |1>|1>)/sqrt2 with control qubit 1: only the control=1 branch flips.
  const PureState joint(joint_basis_superposition(4, 1, 3));
  const auto out = u.apply_controlled(joint, 1);
  EXPECT_NEAR(out[1].real(), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(out[3].real(), -1.0 / std::sqrt(2.0), 1e-15);
}

}  // namespace
}  // namespace qcma
