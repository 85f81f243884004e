#include "oracle.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace moebius;

namespace {

Mat2<Real> random_invertible(std::mt19937_64& rng)
{
    std::uniform_real_distribution<Real> u(-5, 5);
    for (;;) {
        Mat2<Real> m{u(rng), u(rng), u(rng), u(rng)};
        if (std::abs(m.det()) > 0.1L)
            return m;
    }
}

Mat2<Real> random_positive(std::mt19937_64& rng)
{
    std::uniform_real_distribution<Real> u(0.05L, 3);
    return {u(rng), u(rng), u(rng), 1};
}

} // namespace

TEST(Canonicalize, ScalesLargestEntryToOne)
{
    auto f = canonicalize(Mat2<Real>{2, 4, 6, 2});
    EXPECT_NEAR(f.rep().m11, 1.0L / 3, 1e-18L);
    EXPECT_NEAR(f.rep().m12, 2.0L / 3, 1e-18L);
    EXPECT_EQ(f.rep().m21, 1);
    EXPECT_NEAR(f.rep().m22, 1.0L / 3, 1e-18L);
}

TEST(Canonicalize, IdentityAndSign)
{
    EXPECT_EQ(canonicalize(Mat2<Real>::identity()).rep(), Mat2<Real>::identity());
    EXPECT_EQ(canonicalize(Mat2<Real>{-1, 0, 0, -1}).rep(), Mat2<Real>::identity());
}

TEST(Canonicalize, ExactRationalIsScaleInvariant)
{
    Mat2<Rational> m{Rational(3, 7), Rational(-2), Rational(5, 3), Rational(1, 9)};
    for (Rational lambda : {Rational(-4, 3), Rational(11), Rational(1, 1000)})
        EXPECT_EQ(canonicalize(Mat2<Rational>(lambda * m)), canonicalize(m));
}

TEST(Canonicalize, SingularThrows)
{
    EXPECT_THROW(canonicalize(Mat2<Real>{1, 2, 2, 4}), Error);
    EXPECT_THROW(canonicalize(Mat2<Real>{0, 0, 0, 0}), Error);
}

TEST(Canonicalize, RandomScalarsAgreeToUlps)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<Real> scale(-1e6, 1e6);
    const Real tol = 8 * std::numeric_limits<Real>::epsilon();
    for (int i = 0; i < 1000; ++i) {
        auto m = random_invertible(rng);
        Real lambda = scale(rng);
        if (std::abs(lambda) < 1e-3L)
            continue;
        auto f = canonicalize(m), g = canonicalize(Mat2<Real>(lambda * m));
        EXPECT_LE(mat_distance(f.rep(), g.rep()).abs, tol * 2);
        EXPECT_EQ(canonicalize(f.rep()), f);
    }
}

TEST(Canonicalize, ComplexPhaseInvariance)
{
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<Real> u(-3, 3), ph(0, 6.283185307179586L);
    for (int i = 0; i < 1000; ++i) {
        Mat2<Complex> m{{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}};
        if (std::abs(m.det()) < 0.1L)
            continue;
        Complex lambda = std::polar(Real(0.5) + std::abs(u(rng)), ph(rng));
        auto f = canonicalize(m), g = canonicalize(Mat2<Complex>(lambda * m));
        EXPECT_LE(mat_distance(f.rep(), g.rep()).abs, 1e-14L);
    }
}

TEST(SpectralData, Examples)
{
    auto s = spectral_data(ProjectiveMap<Real>::lft(1, 2, 3, 1));
    ASSERT_TRUE(s.defined);
    EXPECT_NEAR(s.det_norm, -5, 1e-15L);
    EXPECT_NEAR(s.sigma, 1, 1e-15L);

    auto t = spectral_data(ProjectiveMap<Real>::lft(1, 1, 0, 1));
    EXPECT_NEAR(t.det_norm, 1, 1e-15L);
    EXPECT_NEAR(t.sigma, 1, 1e-15L);

    EXPECT_FALSE(spectral_data(ProjectiveMap<Real>::lft(1, 1, 1, 0)).defined);
}

TEST(Compose, InversesAndInvolution)
{
    const Real b = 3, a = 2;
    auto s = ProjectiveMap<Real>::lft(1, 0, 0, b);
    auto s_inv = ProjectiveMap<Real>::lft(b, 0, 0, 1);
    EXPECT_EQ(proj_distance(compose(s, s_inv), ProjectiveMap<Real>()), 0);
    auto inv = ProjectiveMap<Real>::lft(0, a, 1, 0);
    EXPECT_LE(proj_distance(compose(inv, inv), ProjectiveMap<Real>()), 1e-18L);
}

TEST(Compose, ProductFormulaEntrywise)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<Real> u(0.1L, 4);
    for (int i = 0; i < 200; ++i) {
        Real al = 1, be = u(rng), ga = u(rng), uu = u(rng), v = u(rng), w = u(rng);
        auto fg = compose(ProjectiveMap<Real>::lft(al, be, ga, 1), ProjectiveMap<Real>::lft(uu, v, w, 1));
        auto expected = ProjectiveMap<Real>::lft(al * uu + be * w, al * v + be, ga * uu + w, ga * v + 1);
        EXPECT_LE(proj_distance(fg, expected), 1e-17L);
    }
}

TEST(Compose, AssociativeOnRandomTriples)
{
    std::mt19937_64 rng(5);
    for (int i = 0; i < 500; ++i) {
        auto f = canonicalize(random_invertible(rng)), g = canonicalize(random_invertible(rng)),
             h = canonicalize(random_invertible(rng));
        EXPECT_LE(proj_distance(compose(compose(f, g), h), compose(f, compose(g, h))), 1e-12L);
    }
}

TEST(Det, Multiplicative)
{
    std::mt19937_64 rng(6);
    for (int i = 0; i < 500; ++i) {
        auto x = random_invertible(rng), y = random_invertible(rng);
        Real lhs = (x * y).det(), rhs = x.det() * y.det();
        EXPECT_LE(std::abs(lhs - rhs), 1e-12L * std::abs(rhs));
    }
}

TEST(Det, CompositeDetNormMatchesFormula)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<Real> u(0.05L, 5);
    for (int i = 0; i < 500; ++i) {
        Real al = u(rng), be = u(rng), ga = u(rng), uu = u(rng), v = u(rng), w = u(rng);
        auto fg = compose(ProjectiveMap<Real>::lft(al, be, ga, 1), ProjectiveMap<Real>::lft(uu, v, w, 1));
        Real expected = (al - be * ga) * (uu - v * w) / ((ga * v + 1) * (ga * v + 1));
        Real got = spectral_data(fg).det_norm;
        EXPECT_LE(std::abs(got - expected), 1e-12L * std::max<Real>(1, std::abs(expected)));
    }
}

TEST(Apply, Examples)
{
    auto r = ProjectiveMap<Real>::lft(1, 1, 1, 0);
    EXPECT_EQ(apply(r, Real(1)).value, 2);
    auto f = ProjectiveMap<Real>::lft(1, 2, 3, 1);
    EXPECT_TRUE(apply(f, Real(-1) / 3).infinite);
    auto t2 = map_T<Real>(2);
    EXPECT_NEAR(apply(t2, Real(1)).value, 1.0L / 3, 1e-18L);
    EXPECT_NEAR(apply(r, ProjectivePoint<Real>::infinity()).value, 1, 1e-18L);
}

TEST(ProjDistance, Examples)
{
    auto f = ProjectiveMap<Real>::lft(2, 1, 1, 3);
    EXPECT_EQ(proj_distance(f, f), 0);
    EXPECT_EQ(proj_distance(f, ProjectiveMap<Real>::lft(-2, -1, -1, -3)), 0);

    auto id = ProjectiveMap<Real>();
    auto half = ProjectiveMap<Real>::lft(1, 0, 0, 2);
    Real d = proj_distance(id, half);
    // (1,0,0,1)/sqrt2 against (1,0,0,2)/sqrt5.
    oracle::Big expected = oracle::proj_distance({1, 0, 0, 1}, {1, 0, 0, 2});
    EXPECT_NEAR(d, static_cast<Real>(expected), 1e-18L);
    EXPECT_GT(d, 0);
    EXPECT_EQ(d, proj_distance(half, id));
}

TEST(ProjDistance, ZeroIffSameCanonicalForm)
{
    std::mt19937_64 rng(8);
    for (int i = 0; i < 300; ++i) {
        auto m = random_positive(rng);
        auto f = canonicalize(m), g = canonicalize(Mat2<Real>(Real(-7) * m));
        EXPECT_LE(proj_distance(f, g), 1e-18L);
        auto h = canonicalize(Mat2<Real>{m.m11 + 0.01L, m.m12, m.m21, m.m22});
        EXPECT_GT(proj_distance(f, h), 0);
        EXPECT_FALSE(f == h);
    }
}

TEST(MatDistance, Examples)
{
    auto id = Mat2<Real>::identity();
    auto d0 = mat_distance(id, id);
    EXPECT_EQ(d0.abs, 0);
    EXPECT_EQ(d0.rel, 0);
    EXPECT_EQ(mat_distance(id, Mat2<Real>::diagonal(1, 2)).abs, 1);
}

TEST(WideFloat, ExtremeProductsKeepTheirLog)
{
    WideFloat<Real> x(Real(0.5));
    WideFloat<Real> acc(Real(1));
    for (int i = 0; i < 100000; ++i)
        acc = acc * x;
    EXPECT_FALSE(acc.is_zero());
    EXPECT_NEAR(acc.log_modulus(), -100000 * std::log(Real(2)), 1e-9L);
}
