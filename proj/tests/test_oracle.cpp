#include "test_util.hpp"

using namespace dqsylv;
using namespace dqsylv::testing;

TEST(Realify, OfOneIsIdentity) {
    EXPECT_TRUE(realify(QuatMatrix::scalar(Quaternion(1))).isApprox(Eigen::Matrix4d::Identity()));
}

TEST(Realify, OfIIsAntisymmetricSquareRootOfMinusOne) {
    const Eigen::MatrixXd m = realify(QuatMatrix::scalar(I));
    EXPECT_TRUE((m + m.transpose()).isZero());
    EXPECT_TRUE((m * m).isApprox(-Eigen::Matrix4d::Identity()));
    EXPECT_TRUE(m.isApprox(left_mult_matrix(I)));
}

TEST(Realify, MultiplicationMatricesMatchProducts) {
    Rng rng(70);
    for (int t = 0; t < 20; ++t) {
        const Quaternion a = random_quaternion(rng), b = random_quaternion(rng);
        const Quaternion ab = a * b;
        const Eigen::Vector4d bv(b.w, b.x, b.y, b.z), av(a.w, a.x, a.y, a.z), abv(ab.w, ab.x, ab.y, ab.z);
        EXPECT_LT((left_mult_matrix(a) * bv - abv).norm(), 1e-12);
        EXPECT_LT((right_mult_matrix(b) * av - abv).norm(), 1e-12);
    }
}

TEST(Realify, IsMultiplicative) {
    Rng rng(71);
    const QuatMatrix a = random_matrix(rng, 2, 3), b = random_matrix(rng, 3, 4);
    EXPECT_LT((realify(a * b) - realify(a) * realify(b)).norm(), 1e-12);
}

TEST(Realvec, RoundTrip) {
    Rng rng(72);
    const QuatMatrix a = random_matrix(rng, 3, 2);
    const Eigen::VectorXd v = realvec(a);
    ASSERT_EQ(v.size(), 24);
    EXPECT_EQ(v(4 * (1 * 3 + 2) + 3), a(2, 1).z);
    EXPECT_EQ(unrealvec(v, 3, 2), a);
}

TEST(BuildSystem, ZeroCoefficients) {
    Rng rng(73);
    const DualQuatMatrix c = random_dq_matrix(rng, 2, 3);
    const RealSystem sys = build_system(DualQuatMatrix::zeros(2, 2), DualQuatMatrix::zeros(2, 3), c);
    EXPECT_EQ(sys.coeff.rows(), 8 * 2 * 3);
    EXPECT_EQ(sys.coeff.cols(), 4 * (2 * 2 * 3 + 2 * 2 * 2));
    EXPECT_TRUE(sys.coeff.isZero());
    EXPECT_LT(sys.rhs.norm() - std::sqrt(c.standard().frobenius_norm2() + c.infinitesimal().frobenius_norm2()),
              1e-12);
}

TEST(BuildSystem, CoefficientTimesUnknownsIsTheLeftHandSide) {
    Rng rng(74);
    const DualQuatMatrix a = random_dq_matrix(rng, 3, 2), b = random_dq_matrix(rng, 4, 2);
    const DualQuatMatrix x = random_dq_matrix(rng, 2, 2), y = random_dq_matrix(rng, 3, 4);
    const DualQuatMatrix c = a * x - y * b;
    const RealSystem sys = build_system(a, b, c);
    Eigen::VectorXd u(sys.layout.total());
    const auto put = [&](const UnknownLayout::Slot& s, const QuatMatrix& m) {
        u.segment(static_cast<Eigen::Index>(s.offset), static_cast<Eigen::Index>(s.length())) = realvec(m);
    };
    put(sys.layout.x0, x.standard());
    put(sys.layout.x1, x.infinitesimal());
    put(sys.layout.y0, y.standard());
    put(sys.layout.y1, y.infinitesimal());
    EXPECT_LT((sys.coeff * u - sys.rhs).norm(), 1e-11);
}

TEST(BuildSystem, RejectsMismatchedShapes) {
    EXPECT_THROW(build_system(DualQuatMatrix::zeros(2, 2), DualQuatMatrix::zeros(2, 2), DualQuatMatrix::zeros(3, 2)),
                 DimensionError);
}

TEST(OracleSolve, ZeroSystem) {
    const DualQuatMatrix z = DualQuatMatrix::zeros(2, 2);
    const OracleResult o = oracle_solve(z, z, z);
    EXPECT_TRUE(o.consistent);
    EXPECT_EQ(o.residual, 0.0);
    EXPECT_TRUE(o.unknowns.isZero());
}

TEST(OracleSolve, IdentityCoefficientsConsistentAndUnpacked) {
    Rng rng(75);
    const DualQuatMatrix a = DualQuatMatrix::identity(3), b = DualQuatMatrix::identity(3);
    const DualQuatMatrix c = random_dq_matrix(rng, 3, 3);
    const OracleResult o = oracle_solve(a, b, c);
    ASSERT_TRUE(o.consistent);
    ASSERT_TRUE(o.solution.has_value());
    EXPECT_LT(dq_norm(sylvester_residual(a, b, c, *o.solution)), 1e-9);
}

TEST(OracleSolve, ZeroCoefficientsResidualIsRhsNorm) {
    Rng rng(76);
    const DualQuatMatrix z = DualQuatMatrix::zeros(2, 2);
    const DualQuatMatrix c = random_dq_matrix(rng, 2, 2);
    const OracleResult o = oracle_solve(z, z, c);
    EXPECT_FALSE(o.consistent);
    EXPECT_FALSE(o.solution.has_value());
    EXPECT_NEAR(o.residual, dq_norm(c), 1e-12);
}

TEST(OracleSolve, ConstructedConsistentInstances) {
    Rng rng(77);
    for (int t = 0; t < 10; ++t) {
        const DualQuatMatrix a = random_dq_matrix(rng, 3, 2), b = random_dq_matrix(rng, 2, 4);
        const DualQuatMatrix c = a * random_dq_matrix(rng, 2, 4) - random_dq_matrix(rng, 3, 2) * b;
        const OracleResult o = oracle_solve(a, b, c);
        EXPECT_LE(o.residual, 1e-10 * (1 + dq_norm(c)));
        ASSERT_TRUE(o.solution.has_value());
        EXPECT_LT(dq_norm(sylvester_residual(a, b, c, *o.solution)), 1e-9);
    }
}
