#include "test_util.hpp"

using namespace dqsylv;
using namespace dqsylv::testing;

TEST(Quaternion, BasisProducts) {
    EXPECT_EQ(I * J, K);
    EXPECT_EQ(J * I, -K);
    EXPECT_EQ(J * K, I);
    EXPECT_EQ(K * I, J);
    EXPECT_EQ(I * I, Quaternion(-1.0));
    EXPECT_EQ(I * J * K, Quaternion(-1.0));
}

TEST(Quaternion, OnePlusITimesOnePlusJ) {
    EXPECT_EQ(Quaternion(1, 1, 0, 0) * Quaternion(1, 0, 1, 0), Quaternion(1, 1, 1, 1));
}

TEST(Quaternion, RandomAlgebraLaws) {
    Rng rng(7);
    for (int n = 0; n < 100; ++n) {
        const Quaternion a = random_quaternion(rng), b = random_quaternion(rng), c = random_quaternion(rng);
        EXPECT_LT(dist(Quaternion(1.0) * a, a), 1e-15);
        EXPECT_LT(dist((a * b) * c, a * (b * c)), 1e-12);
        EXPECT_LT(dist((a * b).conj(), b.conj() * a.conj()), 1e-12);
        EXPECT_NEAR((a * b).norm(), a.norm() * b.norm(), 1e-12 * (1 + a.norm() * b.norm()));
        EXPECT_LT(dist(a * a.inverse(), Quaternion(1.0)), 1e-12);
    }
}

TEST(QuatMatrix, IdentityAndZeroProducts) {
    Rng rng(1);
    const QuatMatrix a = random_matrix(rng, 3, 4);
    EXPECT_EQ(QuatMatrix::identity(3) * a, a);
    EXPECT_EQ(QuatMatrix::zeros(2, 3) * a, QuatMatrix::zeros(2, 4));
    EXPECT_THROW(a * a, DimensionError);
}

TEST(QuatMatrix, ProductIsNotCommutativeEvenOneByOne) {
    const QuatMatrix a = QuatMatrix::scalar(I), b = QuatMatrix::scalar(J);
    EXPECT_EQ((a * b)(0, 0), K);
    EXPECT_EQ((b * a)(0, 0), -K);
}

TEST(QuatMatrix, ConjugateTranspose) {
    EXPECT_EQ(conj_transpose(QuatMatrix::identity(3)), QuatMatrix::identity(3));
    EXPECT_EQ(conj_transpose(QuatMatrix::scalar(I))(0, 0), -I);
    Rng rng(2);
    const QuatMatrix a = random_matrix(rng, 3, 2), b = random_matrix(rng, 2, 4);
    EXPECT_EQ(conj_transpose(conj_transpose(a)), a);
    EXPECT_LT(dist(conj_transpose(a * b), conj_transpose(b) * conj_transpose(a)), 1e-12);
}

TEST(QuatMatrix, BlocksAssembleAndSlice) {
    Rng rng(3);
    const QuatMatrix a = random_matrix(rng, 2, 3), b = random_matrix(rng, 2, 1), c = random_matrix(rng, 1, 4);
    const QuatMatrix m = QuatMatrix::blocks({{a, b}, {c}});
    EXPECT_EQ(m.rows(), 3u);
    EXPECT_EQ(m.cols(), 4u);
    EXPECT_EQ(m.block(0, 0, 2, 3), a);
    EXPECT_EQ(m.block(0, 3, 2, 1), b);
    EXPECT_EQ(m.block(2, 0, 1, 4), c);
    EXPECT_THROW(QuatMatrix::blocks({{a, c}}), DimensionError);
}

TEST(ComplexAdjoint, OfJ) {
    const ComplexAdjoint m = complex_adjoint(QuatMatrix::scalar(J));
    ASSERT_EQ(m.rows(), 2);
    EXPECT_EQ(m(0, 0), std::complex<double>(0, 0));
    EXPECT_EQ(m(0, 1), std::complex<double>(1, 0));
    EXPECT_EQ(m(1, 0), std::complex<double>(-1, 0));
    EXPECT_EQ(m(1, 1), std::complex<double>(0, 0));
}

TEST(ComplexAdjoint, RoundTripAndHomomorphism) {
    Rng rng(4);
    const QuatMatrix a = random_matrix(rng, 5, 3), b = random_matrix(rng, 3, 2);
    EXPECT_LT(dist(from_adjoint(complex_adjoint(a)), a), 1e-14);
    EXPECT_LT((complex_adjoint(a * b) - complex_adjoint(a) * complex_adjoint(b)).norm(), 1e-12);
    EXPECT_LT((complex_adjoint(conj_transpose(a)) - complex_adjoint(a).adjoint()).norm(), 1e-14);
}

TEST(ComplexAdjoint, RejectsMatricesOutsideTheImage) {
    ComplexAdjoint m = ComplexAdjoint::Zero(2, 2);
    m(0, 0) = 1.0;
    EXPECT_THROW(from_adjoint(m), NumericalError);
    EXPECT_THROW(from_adjoint(ComplexAdjoint::Zero(3, 2)), DimensionError);
}

TEST(Pinv, Trivial) {
    EXPECT_LT(dist(pinv(QuatMatrix::identity(3)), QuatMatrix::identity(3)), 1e-14);
    EXPECT_EQ(pinv(QuatMatrix::zeros(2, 5)), QuatMatrix::zeros(5, 2));
}

TEST(Pinv, ColumnIJ) {
    const QuatMatrix a = qm(2, 1, {I, J});
    const QuatMatrix p = pinv(a);
    EXPECT_LT(dist(p, qm(1, 2, {-0.5 * I, -0.5 * J})), 1e-14);
    EXPECT_LT(dist(a * p * a, a), 1e-14);
    EXPECT_LT(dist(p * a * p, p), 1e-14);
    EXPECT_LT(dist(conj_transpose(a * p), a * p), 1e-14);
    EXPECT_LT(dist(conj_transpose(p * a), p * a), 1e-14);
}

TEST(Pinv, PenroseEquationsOnRankDeficientMatrices) {
    Rng rng(5);
    for (int n = 0; n < 20; ++n) {
        const std::size_t r = rng.index(1, 6), c = rng.index(1, 6);
        const QuatMatrix a = random_rank_matrix(rng, r, c, rng.index(0, std::min(r, c)));
        const QuatMatrix p = pinv(a);
        const double s = 1e-12 * (1.0 + a.frobenius_norm() * p.frobenius_norm());
        EXPECT_LT(dist(a * p * a, a), s * (1 + a.frobenius_norm()));
        EXPECT_LT(dist(p * a * p, p), s * (1 + p.frobenius_norm()));
        EXPECT_LT(dist(conj_transpose(a * p), a * p), s);
        EXPECT_LT(dist(conj_transpose(p * a), p * a), s);
    }
}

TEST(Rank, Trivial) {
    EXPECT_EQ(rank(QuatMatrix::zeros(3, 4)), 0u);
    EXPECT_EQ(rank(QuatMatrix::identity(4)), 4u);
    EXPECT_EQ(rank(QuatMatrix{}), 0u);
}

TEST(Rank, OuterProductHasRankOne) {
    Rng rng(6);
    for (int n = 0; n < 10; ++n) {
        const QuatMatrix u = random_matrix(rng, 4, 1), v = random_matrix(rng, 3, 1);
        EXPECT_EQ(rank(u * conj_transpose(v)), 1u);
    }
}

TEST(Rank, MatchesConstructedRank) {
    Rng rng(8);
    for (std::size_t r = 0; r <= 4; ++r) EXPECT_EQ(rank(random_rank_matrix(rng, 5, 4, r)), r);
}

TEST(Rank, RankInfoBracketsTheThreshold) {
    Rng rng(9);
    const RankInfo info = rank_info(random_rank_matrix(rng, 5, 5, 3));
    EXPECT_EQ(info.rank, 3u);
    EXPECT_GT(info.smallest_kept, info.tol);
    EXPECT_LE(info.largest_dropped, info.tol);
}

TEST(Projectors, Trivial) {
    EXPECT_LT(proj_L(QuatMatrix::identity(3)).frobenius_norm(), 1e-14);
    EXPECT_LT(proj_R(QuatMatrix::identity(3)).frobenius_norm(), 1e-14);
    EXPECT_EQ(proj_L(QuatMatrix::zeros(2, 3)), QuatMatrix::identity(3));
    EXPECT_EQ(proj_R(QuatMatrix::zeros(2, 3)), QuatMatrix::identity(2));
}

TEST(Projectors, FullColumnRank) {
    Rng rng(10);
    const QuatMatrix a = random_matrix(rng, 5, 2);
    const QuatMatrix l = proj_L(a), r = proj_R(a);
    EXPECT_LT(l.frobenius_norm(), 1e-10);
    EXPECT_LT(dist(r * r, r), 1e-10);
    EXPECT_LT((r * a).frobenius_norm(), 1e-10);
}

TEST(Projectors, IdempotentHermitianAnnihilating) {
    Rng rng(11);
    for (int n = 0; n < 10; ++n) {
        const QuatMatrix a = random_rank_matrix(rng, 4, 5, rng.index(0, 4));
        const QuatMatrix l = proj_L(a), r = proj_R(a);
        EXPECT_LT(dist(l * l, l), 1e-10);
        EXPECT_LT(dist(r * r, r), 1e-10);
        EXPECT_LT(dist(conj_transpose(l), l), 1e-10);
        EXPECT_LT((a * l).frobenius_norm(), 1e-10);
        EXPECT_LT((r * a).frobenius_norm(), 1e-10);
    }
}

TEST(MatrixIo, QmRoundTripIsBitExact) {
    Rng rng(12);
    const QuatMatrix a = random_matrix(rng, 3, 2);
    std::stringstream ss;
    write_qm(ss, a);
    EXPECT_EQ(read_qm(ss), a);
}

TEST(MatrixIo, QmToleratesBlankLinesAndRejectsGarbage) {
    std::istringstream ok("qm 1 1\n\n1 2 3 4\r\n\n");
    EXPECT_EQ(read_qm(ok)(0, 0), Quaternion(1, 2, 3, 4));
    std::istringstream comment("# note\nqm 1 1\n1 2 3 4\n");
    EXPECT_THROW(read_qm(comment), ParseError);
    std::istringstream short_body("qm 1 2\n1 2 3 4\n");
    EXPECT_THROW(read_qm(short_body), ParseError);
    std::istringstream bad_number("qm 1 1\n1 2 x 4\n");
    EXPECT_THROW(read_qm(bad_number), ParseError);
    std::istringstream bad_magic("dqm 1 1\n1 2 3 4\n1 2 3 4\n");
    EXPECT_THROW(read_qm(bad_magic), ParseError);
}
