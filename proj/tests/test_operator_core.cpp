#include <cmath>
#include <complex>

#include "doctest.h"
#include "qee/linalg.hpp"
#include "qee/oracle.hpp"
#include "qee/protocol.hpp"
#include "qee/random.hpp"
#include "support/test_oracles.hpp"

using namespace qee;
namespace ts = testsupport;

namespace {

DensityOperator random_product_state(RandomStream& rng, Index d_env) {
  const DensityOperator rho_q = random_density(rng, 2);
  const DensityOperator r_env = random_density(rng, d_env);
  return DensityOperator(kron(rho_q.matrix(), r_env.matrix()));
}

ComplexMatrix bell_state_matrix() {
  // (|00> + |11>) / sqrt(2) on qubit (x) qubit, qubit-major joint indexing.
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(4);
  psi(0) = 1.0 / std::sqrt(2.0);
  psi(3) = 1.0 / std::sqrt(2.0);
  return psi * psi.adjoint();
}

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("matrix exponential: zero Hamiltonian gives the identity") {
  const ComplexMatrix h = ComplexMatrix::Zero(4, 4);
  for (double t : {0.0, 1.0, -2.5, 17.0}) {
    const ComplexMatrix u = expm_hermitian_unitary(h, t);
    CHECK(max_abs(u - ComplexMatrix::Identity(4, 4)) < 1e-14);
  }
}

TEST_CASE("matrix exponential: diagonal phases are exact") {
  ComplexMatrix h = ComplexMatrix::Zero(2, 2);
  h(0, 0) = 1.0;
  h(1, 1) = -1.0;
  const ComplexMatrix u = expm_hermitian_unitary(h, M_PI, 1.0);
  // exp(-i pi diag(1,-1)) = diag(e^{-i pi}, e^{+i pi}) = -I.
  CHECK(max_abs(u + ComplexMatrix::Identity(2, 2)) < 1e-12);
}

TEST_CASE("matrix exponential matches a Taylor series oracle") {
  RandomStream rng(101);
  const ComplexMatrix h = random_hermitian(rng, 6, 2.0);
  SUBCASE("unit hbar") {
    CHECK(ts::frob_diff(expm_hermitian_unitary(h, 0.7), ts::taylor_expm(h, 0.7)) < 1e-9);
  }
  SUBCASE("physical hbar") {
    const double hbar = constants::hbar_meV_ps;
    CHECK(ts::frob_diff(expm_hermitian_unitary(h, 0.7, hbar),
                        ts::taylor_expm(h, 0.7, hbar)) < 1e-9);
  }
}

TEST_CASE("matrix exponential rejects non-Hermitian input with the defect size") {
  ComplexMatrix h = ComplexMatrix::Zero(3, 3);
  h(0, 1) = 1.0;  // h(1,0) stays 0: defect 1
  CHECK_THROWS_AS(expm_hermitian_unitary(h, 1.0), ValidationError);
  try {
    expm_hermitian_unitary(h, 1.0);
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("1") != std::string::npos);
  }
}

TEST_CASE("matrix exponential: inverse and group properties") {
  RandomStream rng(77);
  for (int trial = 0; trial < 6; ++trial) {
    const Index d = 3 + trial % 3;
    const ComplexMatrix h = random_hermitian(rng, d, 1.5);
    const double t = -10.0 + 20.0 * rng.uniform();
    const ComplexMatrix forward = expm_hermitian_unitary(h, t);
    const ComplexMatrix backward = expm_hermitian_unitary(h, -t);
    CHECK(max_abs(forward * backward - ComplexMatrix::Identity(d, d)) < 1e-10);

    const double t2 = -10.0 + 20.0 * rng.uniform();
    const ComplexMatrix combined = expm_hermitian_unitary(h, t + t2);
    const ComplexMatrix product = expm_hermitian_unitary(h, t2) * forward;
    CHECK(ts::frob_diff(combined, product) < 1e-10);
  }
}

TEST_CASE("Hermitian eigensystem agrees with the Jacobi oracle") {
  RandomStream rng(9004);
  const ComplexMatrix h = random_hermitian(rng, 7, 3.0);
  const HermitianEigensystem sys(h);
  const std::vector<double> reference = ts::jacobi_eigenvalues(h);
  REQUIRE(sys.eigenvalues().size() == static_cast<Index>(reference.size()));
  for (Index i = 0; i < sys.dim(); ++i)
    CHECK(sys.eigenvalues()(i) == doctest::Approx(reference[static_cast<std::size_t>(i)])
                                      .epsilon(1e-10));
  // Reconstruction: U diag U^dag = H.
  const ComplexMatrix rebuilt = sys.eigenvectors() *
                                sys.eigenvalues().cast<Complex>().asDiagonal() *
                                sys.eigenvectors().adjoint();
  CHECK(ts::frob_diff(rebuilt, h) < 1e-10);
}

TEST_CASE("partial trace over the environment") {
  RandomStream rng(11);
  SUBCASE("product state factorizes") {
    const DensityOperator rho_q = random_density(rng, 2);
    const DensityOperator r_env = random_density(rng, 5);
    const DensityOperator joint(kron(rho_q.matrix(), r_env.matrix()));
    const DensityOperator reduced = partial_trace_env(joint, BipartiteIndex{5});
    CHECK(ts::frob_diff(reduced.matrix(), rho_q.matrix()) < 1e-12);
  }
  SUBCASE("maximally entangled state reduces to I/2") {
    const DensityOperator bell(bell_state_matrix());
    const DensityOperator reduced = partial_trace_env(bell, BipartiteIndex{2});
    CHECK(max_abs(reduced.matrix() - ComplexMatrix::Identity(2, 2) / 2.0) < 1e-14);
  }
  SUBCASE("random joint state matches the index-summation oracle") {
    const DensityOperator joint = random_density(rng, 8);
    const DensityOperator reduced = partial_trace_env(joint, BipartiteIndex{4});
    CHECK(ts::frob_diff(reduced.matrix(),
                        ts::partial_trace_env_oracle(joint.matrix(), 4)) < 1e-13);
    CHECK(std::abs(reduced.matrix().trace().real() - 1.0) < 1e-12);
  }
  SUBCASE("invariant under environment-local unitaries") {
    const DensityOperator joint = random_density(rng, 6);
    const ComplexMatrix u_env = random_unitary(rng, 3);
    const ComplexMatrix u = kron(ComplexMatrix::Identity(2, 2), u_env);
    const DensityOperator rotated =
        DensityOperator::trusted(u * joint.matrix() * u.adjoint());
    const BipartiteIndex idx{3};
    CHECK(ts::frob_diff(partial_trace_env(joint, idx).matrix(),
                        partial_trace_env(rotated, idx).matrix()) < 1e-12);
  }
}

TEST_CASE("partial trace over the qubit") {
  RandomStream rng(12);
  SUBCASE("product state factorizes") {
    const DensityOperator rho_q = random_density(rng, 2);
    const DensityOperator r_env = random_density(rng, 4);
    const DensityOperator joint(kron(rho_q.matrix(), r_env.matrix()));
    const DensityOperator reduced = partial_trace_qubit(joint, BipartiteIndex{4});
    CHECK(ts::frob_diff(reduced.matrix(), r_env.matrix()) < 1e-12);
  }
  SUBCASE("random joint state matches the index-summation oracle and keeps trace") {
    const DensityOperator joint = random_density(rng, 10);
    const DensityOperator reduced = partial_trace_qubit(joint, BipartiteIndex{5});
    CHECK(ts::frob_diff(reduced.matrix(),
                        ts::partial_trace_qubit_oracle(joint.matrix(), 5)) < 1e-13);
    CHECK(std::abs(reduced.matrix().trace().real() - 1.0) < 1e-12);
  }
  SUBCASE("pointer-state evolution reduces to the conditional environment state") {
    // Evolving |0><0| (x) R0 and tracing out the qubit must give R00(tau).
    const ModelRecipe recipe{.seed = 404, .n_spins = 2, .coupling_scale_meV = 1.0,
                             .asymmetric = false, .thermal_beta = 0.5};
    const GeneratedModel gen = generate_model(recipe);
    const double tau = 1.1;
    const JointState evolved = evolve_joint(gen.model, qubit_ground(), gen.r0, tau);
    const DensityOperator reduced =
        partial_trace_qubit(evolved.state, BipartiteIndex{gen.model.d_env()});
    const ConditionalEnvStates cond = conditional_env_states(gen.model, gen.r0, tau);
    CHECK(ts::frob_diff(reduced.matrix(), cond.r00.matrix()) < 1e-12);
  }
}

TEST_CASE("partial transpose over the qubit is an involution matching the oracle") {
  RandomStream rng(13);
  const DensityOperator joint = random_density(rng, 8);
  const BipartiteIndex idx{4};
  const ComplexMatrix pt = partial_transpose_qubit(joint.matrix(), idx);
  CHECK(ts::frob_diff(pt, ts::partial_transpose_qubit_oracle(joint.matrix(), 4)) == 0.0);
  CHECK(ts::frob_diff(partial_transpose_qubit(pt, idx), joint.matrix()) == 0.0);
}

TEST_CASE("negativity") {
  RandomStream rng(14);
  SUBCASE("product states give exactly zero after clamping") {
    for (int trial = 0; trial < 1000; ++trial) {
      const Index d_env = 2 + trial % 3;
      const DensityOperator product = random_product_state(rng, d_env);
      CHECK(negativity(product, BipartiteIndex{d_env}) == 0.0);
    }
  }
  SUBCASE("maximally entangled two-qubit state gives 1/2") {
    const DensityOperator bell(bell_state_matrix());
    CHECK(negativity(bell, BipartiteIndex{2}) == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("random state matches the brute-force eigenvalue oracle") {
    for (int trial = 0; trial < 20; ++trial) {
      const DensityOperator joint = random_density(rng, 16);
      const double lib = negativity(joint, BipartiteIndex{8});
      const double ref = ts::negativity_oracle(joint.matrix(), 8);
      CHECK(std::abs(lib - ref) < 1e-10);
    }
  }
  SUBCASE("invariant under local unitaries") {
    const DensityOperator joint = random_density(rng, 8);
    const ComplexMatrix u = kron(random_unitary(rng, 2), random_unitary(rng, 4));
    const DensityOperator rotated =
        DensityOperator::trusted(u * joint.matrix() * u.adjoint());
    const BipartiteIndex idx{4};
    CHECK(std::abs(negativity(joint, idx) - negativity(rotated, idx)) < 1e-10);
  }
}

TEST_CASE("commutator norm") {
  RandomStream rng(15);
  SUBCASE("equal and diagonal inputs commute") {
    const ComplexMatrix a = random_hermitian(rng, 4, 1.0);
    CHECK(commutator_norm(a, a) == 0.0);
    ComplexMatrix d1 = ComplexMatrix::Zero(3, 3), d2 = ComplexMatrix::Zero(3, 3);
    d1.diagonal() << 1.0, 2.0, 3.0;
    d2.diagonal() << -4.0, 0.5, 2.5;
    CHECK(commutator_norm(d1, d2) == 0.0);
  }
  SUBCASE("Pauli X and Z give 2 sqrt(2)") {
    ComplexMatrix x(2, 2), z(2, 2);
    x << 0, 1, 1, 0;
    z << 1, 0, 0, -1;
    CHECK(commutator_norm(x, z) == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-14));
  }
  SUBCASE("dimension mismatch is rejected") {
    CHECK_THROWS_AS(commutator_norm(ComplexMatrix::Zero(2, 2), ComplexMatrix::Zero(3, 3)),
                    ValidationError);
  }
}

TEST_CASE("density operator validation") {
  SUBCASE("accepts a valid state") {
    ComplexMatrix m(2, 2);
    m << 0.5, Complex(0.1, 0.2), Complex(0.1, -0.2), 0.5;
    CHECK_NOTHROW(DensityOperator{m});
  }
  SUBCASE("rejects non-Hermitian matrices") {
    ComplexMatrix m(2, 2);
    m << 0.5, 0.3, 0.1, 0.5;
    CHECK_THROWS_AS(DensityOperator{m}, ValidationError);
  }
  SUBCASE("rejects wrong trace") {
    CHECK_THROWS_AS(DensityOperator{ComplexMatrix::Identity(2, 2)}, ValidationError);
  }
  SUBCASE("rejects indefinite matrices") {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 0) = 1.5;
    m(1, 1) = -0.5;
    CHECK_THROWS_AS(DensityOperator{m}, ValidationError);
  }
  SUBCASE("rejects non-finite entries") {
    ComplexMatrix m = ComplexMatrix::Identity(3, 3) / 3.0;
    m(1, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(DensityOperator{m}, ValidationError);
  }
}

TEST_CASE("bipartite index bookkeeping") {
  const BipartiteIndex idx{5};
  CHECK(idx.total() == 10);
  CHECK(idx.joint(0, 3) == 3);
  CHECK(idx.joint(1, 2) == 7);
}

TEST_CASE("kron respects the mixed-product rule") {
  RandomStream rng(16);
  const ComplexMatrix a = random_hermitian(rng, 2, 1.0);
  const ComplexMatrix b = random_hermitian(rng, 3, 1.0);
  const ComplexMatrix c = random_hermitian(rng, 2, 1.0);
  const ComplexMatrix d = random_hermitian(rng, 3, 1.0);
  CHECK(ts::frob_diff(kron(a, b) * kron(c, d), kron(a * c, b * d)) < 1e-12);
}
