#include "test_util.hpp"

#include <numbers>

using namespace dqsylv;
using namespace dqsylv::testing;

namespace {
const DualQuaternion kOne{Quaternion(1), Quaternion(0)};
}

TEST(PoseToUdq, IdentityPose) {
    EXPECT_EQ(pose_to_udq({1, 0, 0}, 0.0, {0, 0, 0}), kOne);
}

TEST(PoseToUdq, HalfTurnAboutK) {
    const DualQuaternion q = pose_to_udq({0, 0, 1}, std::numbers::pi, {0, 0, 0});
    EXPECT_LT(dist(q.real, K), 1e-15);
    EXPECT_EQ(q.dual, Quaternion(0));
}

TEST(PoseToUdq, PureTranslation) {
    const DualQuaternion q = pose_to_udq({1, 0, 0}, 0.0, {2, 0, 0});
    EXPECT_EQ(q.real, Quaternion(1));
    EXPECT_EQ(q.dual, I);
}

TEST(PoseToUdq, RejectsNonUnitAxis) {
    EXPECT_THROW(pose_to_udq({1, 1, 0}, 0.3, {0, 0, 0}), std::invalid_argument);
}

TEST(PoseToUdq, OutputIsUnitAndScrewParamsRoundTrip) {
    Rng rng(80);
    for (int t = 0; t < 20; ++t) {
        const Quaternion u = random_unit_quaternion(rng);
        const double s = std::sqrt(u.x * u.x + u.y * u.y + u.z * u.z);
        const Vec3 axis{u.x / s, u.y / s, u.z / s};
        const double angle = rng.uniform(0.1, 3.0);
        const Vec3 tr{rng.normal(), rng.normal(), rng.normal()};
        const DualQuaternion q = pose_to_udq(axis, angle, tr);
        EXPECT_TRUE(is_unit(q));
        const ScrewParams p = screw_params(q);
        EXPECT_NEAR(p.angle, angle, 1e-12);
        for (int c = 0; c < 3; ++c) {
            EXPECT_NEAR(p.axis[c], axis[c], 1e-12);
            EXPECT_NEAR(p.translation[c], tr[c], 1e-12);
        }
        EXPECT_NEAR(p.displacement, axis[0] * tr[0] + axis[1] * tr[1] + axis[2] * tr[2], 1e-12);
    }
}

TEST(UnitDualQuaternion, ConjugateIsInverse) {
    Rng rng(81);
    const DualQuaternion q = random_udq(rng);
    const DualQuaternion p = q * conj(q);
    EXPECT_LT(dist(p.real, Quaternion(1)), 1e-14);
    EXPECT_LT(p.dual.norm(), 1e-14);
}

TEST(UnitDualQuaternion, NormalizeProjectsOntoUnitSet) {
    Rng rng(82);
    const DualQuaternion q{random_quaternion(rng), random_quaternion(rng)};
    const DualQuaternion u = normalize_udq(q);
    EXPECT_TRUE(is_unit(u, 1e-14));
    EXPECT_THROW(normalize_udq({Quaternion(0), Quaternion(1)}), NumericalError);
}

TEST(GenHandEye, IdentityUnknownsGiveEqualPairs) {
    for (const auto& p : gen_handeye_instance(kOne, kOne, 5, 0.0, 3)) {
        EXPECT_LT(dist(p.a.real, p.b.real), 1e-14);
        EXPECT_LT(dist(p.a.dual, p.b.dual), 1e-14);
    }
}

TEST(GenHandEye, NoiselessPairsSatisfyTheRelation) {
    Rng rng(83);
    const DualQuaternion x = random_udq(rng), y = random_udq(rng);
    const auto pairs = gen_handeye_instance(x, y, 10, 0.0, 4);
    ASSERT_EQ(pairs.size(), 10u);
    for (const auto& p : pairs) {
        EXPECT_TRUE(is_unit(p.a));
        EXPECT_LE(dq_norm(p.a * x - y * p.b), 1e-12);
    }
}

TEST(GenHandEye, NoiseScalesTheResidual) {
    Rng rng(84);
    const DualQuaternion x = random_udq(rng), y = random_udq(rng);
    for (const auto& p : gen_handeye_instance(x, y, 10, 1e-3, 5)) {
        EXPECT_TRUE(is_unit(p.a));
        const double r = dq_norm(p.a * x - y * p.b);
        EXPECT_GT(r, 1e-5);
        EXPECT_LT(r, 5e-2);
    }
}

TEST(GenHandEye, DeterministicInSeed) {
    Rng rng(85);
    const DualQuaternion x = random_udq(rng), y = random_udq(rng);
    const auto p = gen_handeye_instance(x, y, 3, 1e-3, 9), q = gen_handeye_instance(x, y, 3, 1e-3, 9);
    for (std::size_t n = 0; n < 3; ++n) {
        EXPECT_EQ(p[n].a, q[n].a);
        EXPECT_EQ(p[n].b, q[n].b);
    }
}

TEST(SolveHandEye, TrivialPair) {
    const auto s = solve_handeye_pair(kOne, kOne, 1);
    ASSERT_TRUE(s.has_value());
    EXPECT_LE(s->residual, 1e-10);
    EXPECT_TRUE(is_unit(s->x, 1e-10));
    EXPECT_LT(dist(s->x.real, s->y.real) + dist(s->x.dual, s->y.dual), 1e-10);
}

TEST(SolveHandEye, GeneratedPairsGiveUnitSolutions) {
    Rng rng(86);
    for (int t = 0; t < 10; ++t) {
        const DualQuaternion x = random_udq(rng), y = random_udq(rng);
        for (const auto& p : gen_handeye_instance(x, y, 3, 0.0, 100 + t)) {
            const auto s = solve_handeye_pair(p.a, p.b, 7);
            ASSERT_TRUE(s.has_value());
            EXPECT_LE(s->residual, 1e-8);
            EXPECT_TRUE(is_unit(s->x, 1e-9));
            EXPECT_TRUE(is_unit(s->y, 1e-9));
        }
    }
}

TEST(SolveHandEye, NonUnitInputIsDegenerate) {
    const DualQuaternion two{Quaternion(2), Quaternion(0)};
    EXPECT_FALSE(solve_handeye_pair(two, kOne, 1).has_value());
}
