#include <gtest/gtest.h>

#include <numbers>

#include "test_util.hpp"

using namespace minutia;

namespace {

// Field whose angle at block (i, j) is f(phi), phi the polar angle around (ci, cj), y up.
template <typename F>
OrientationField polar_field(int n, double ci, double cj, F f)
{
    OrientationField field(n, n, 16);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            field.at(i, j) = wrap_pi(f(std::atan2(-(i - ci), j - cj)));
    return field;
}

} // namespace

TEST(Core, LoopCentreWithinTwelvePixels)
{
    const auto img = synth::loop_pattern(200, 200, 100.3, 90.3, 9.0);
    const auto c = complex_core(img);
    EXPECT_LE(std::hypot(c.x - 100.3, c.y - 90.3), 12.0) << c.x << "," << c.y;
}

TEST(Core, TranslationEquivariance)
{
    const auto a = complex_core(synth::loop_pattern(200, 200, 100.3, 90.3, 9.0));
    const auto b = complex_core(synth::loop_pattern(200, 200, 110.3, 97.3, 9.0));
    EXPECT_NEAR(b.x - a.x, 10, 2);
    EXPECT_NEAR(b.y - a.y, 7, 2);
}

TEST(Core, UniformImageHasNoForeground)
{
    EXPECT_THROW(complex_core(GrayImage(128, 128, 200)), Error);
    EXPECT_THROW(complex_core(GrayImage()), Error);
}

TEST(Core, ResponseIsFiniteAndSized)
{
    const auto img = synth::loop_pattern(120, 100, 60.3, 40.3, 9.0);
    const auto r = core_response(img);
    ASSERT_EQ(r.width(), img.width());
    ASSERT_EQ(r.height(), img.height());
    for (double v : r.pixels())
        EXPECT_TRUE(std::isfinite(v));
}

TEST(Core, MaskEmptyOnFlatImage)
{
    EXPECT_EQ(morph::count_ones(core_mask(GrayImage(96, 96, 17))), 0u);
}

TEST(Poincare, UniformFieldIsNone)
{
    OrientationField f(5, 5, 16, 0.7);
    EXPECT_EQ(poincare_sum(f, 2, 2), 0.0);
    EXPECT_EQ(poincare_index(f, 2, 2), SingularityLabel::none);
}

TEST(Poincare, AnalyticSingularities)
{
    const auto loop = polar_field(7, 3.0, 3.0, [](double p) { return p / 2; });
    const auto delta = polar_field(7, 3.0, 3.0, [](double p) { return -p / 2; });
    const auto whorl = polar_field(7, 3.0, 3.0, [](double p) { return p + std::numbers::pi / 2; });
    EXPECT_EQ(poincare_index(loop, 3, 3), SingularityLabel::loop);
    EXPECT_EQ(poincare_index(delta, 3, 3), SingularityLabel::delta);
    EXPECT_EQ(poincare_index(whorl, 3, 3), SingularityLabel::whorl);
    for (int i = 1; i < 6; ++i)
        for (int j = 1; j < 6; ++j)
            if (std::abs(i - 3) > 1 || std::abs(j - 3) > 1)
                EXPECT_EQ(poincare_index(loop, i, j), SingularityLabel::none);
}

TEST(Poincare, LoopImageFieldAgreesWithAnalyticSign)
{
    // Block grid 16 px; centre the loop inside block (5, 5).
    const auto img = synth::loop_pattern(192, 192, 88.3, 88.3, 9.0);
    const auto f = orientation_field(img, 16);
    bool found = false;
    for (int i = 4; i <= 6; ++i)
        for (int j = 4; j <= 6; ++j)
            found = found || poincare_index(f, i, j) == SingularityLabel::loop;
    EXPECT_TRUE(found);
}

TEST(Poincare, SmoothFieldsSumToZero)
{
    SplitMix64 rng(31);
    for (int n = 0; n < 200; ++n) {
        const double a = (rng.uniform01() - 0.5) * 0.5;
        const double b = (rng.uniform01() - 0.5) * 0.5;
        const double c = rng.uniform01() * std::numbers::pi;
        OrientationField f(6, 6, 16);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j)
                f.at(i, j) = wrap_pi(c + a * i + b * j);
        for (int i = 1; i < 5; ++i)
            for (int j = 1; j < 5; ++j) {
                EXPECT_NEAR(poincare_sum(f, i, j), 0.0, 1e-9);
                EXPECT_EQ(poincare_index(f, i, j), SingularityLabel::none);
            }
    }
}

TEST(Poincare, BorderRejected)
{
    OrientationField f(4, 4, 16);
    EXPECT_THROW(poincare_sum(f, 0, 1), Error);
    EXPECT_THROW(poincare_sum(f, 1, 3), Error);
}
