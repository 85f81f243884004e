#include "moebius/moebius.hpp"

#include <gtest/gtest.h>

using namespace moebius;

TEST(Identities, DefaultSuitePasses)
{
    auto checks = verify_identities();
    ASSERT_EQ(checks.size(), 5u + 3u * 3u);
    for (const auto& c : checks)
        EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
}

TEST(Identities, ExampleOneDistanceIsExactlyZero)
{
    auto c = check_exr_identity(Rational(1, 2));
    EXPECT_TRUE(c.passed);
    EXPECT_EQ(c.value, 0);
}

TEST(Identities, CorruptedGeneratorFailsTheFirstCheck)
{
    IdentityOptions opt;
    opt.exr_a = Rational(3, 5);
    auto checks = verify_identities(opt);
    EXPECT_FALSE(checks.front().passed);
    EXPECT_EQ(checks.front().name, "ABA^3BA = diag(-2/9, 1)");
    EXPECT_NE(checks.front().detail.find("a = 3/5"), std::string::npos);
    for (std::size_t i = 1; i < checks.size(); ++i)
        EXPECT_TRUE(checks[i].passed) << checks[i].name;
}

TEST(Identities, SeedsChangeSamplesNotVerdicts)
{
    for (std::uint64_t seed : {1u, 99u, 12345u}) {
        IdentityOptions opt;
        opt.seed = seed;
        opt.exc2_r.clear();
        for (const auto& c : verify_identities(opt))
            EXPECT_TRUE(c.passed) << c.name << " seed " << seed;
    }
}
