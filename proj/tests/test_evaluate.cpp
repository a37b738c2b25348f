#include <gtest/gtest.h>

#include <cmath>

#include "test_util.hpp"

using namespace minutia;

namespace {

std::vector<Template> separated_store(std::uint64_t seed, int fingers = 8)
{
    synth::StoreSpec spec;
    spec.fingers = fingers;
    spec.rows = 14;
    spec.min_separation = 18;
    spec.seed = seed;
    return synth::random_store(spec);
}

ErrorSurfaces surfaces_from(int n, std::function<double(int, int)> far, std::function<double(int, int)> frr)
{
    ErrorSurfaces s{RateSurface(n, n), RateSurface(n, n), 1, 1};
    for (int a = 1; a <= n; ++a)
        for (int b = 1; b <= n; ++b) {
            s.far.at(a, b) = far(a, b);
            s.frr.at(a, b) = frr(a, b);
        }
    return s;
}

} // namespace

TEST(Perturb, ZeroRatioIsIdentity)
{
    SplitMix64 rng(71);
    NoiseModel model;
    model.track_ratio = 0.0;
    for (int n = 0; n < 50; ++n) {
        const auto t = testutil::random_table(rng);
        EXPECT_EQ(perturb_table(t, model, rng), t);
    }
}

TEST(Perturb, CountsStayNonNegative)
{
    SplitMix64 rng(72);
    NoiseModel model;
    model.track_ratio = 1.0;
    model.max_salt = 5;
    for (int n = 0; n < 200; ++n) {
        const auto t = testutil::random_table(rng, 24, 3);
        const auto p = perturb_table(t, model, rng);
        ASSERT_EQ(p.size(), t.size());
        for (const auto& r : p.rows) {
            EXPECT_GE(r.term, 0);
            EXPECT_GE(r.bif, 0);
        }
    }
}

TEST(Perturb, RejectsBadModel)
{
    SplitMix64 rng(73);
    MinutiaeTable t;
    t.rows = {{1, 1}};
    NoiseModel bad;
    bad.track_ratio = 1.5;
    EXPECT_THROW(perturb_table(t, bad, rng), Error);
    bad.track_ratio = 0.3;
    bad.max_salt = -1;
    EXPECT_THROW(perturb_table(t, bad, rng), Error);
    EXPECT_THROW(perturb_table(MinutiaeTable{}, NoiseModel{}, rng), Error);
}

TEST(Protocol, AttemptCounts)
{
    const auto store = separated_store(81);
    const auto s = run_protocol(store, NoiseModel{}, 70, 70);
    EXPECT_EQ(s.ngra, 24);
    EXPECT_EQ(s.nira, 24 * 7);
}

TEST(Protocol, SeparatedFingersCornerRates)
{
    const auto s = run_protocol(separated_store(82), NoiseModel{}, 70, 70);
    // Every mean is at least 2, so threshold 1 accepts nothing.
    EXPECT_EQ(s.far.at(1, 1), 0.0);
    EXPECT_EQ(s.frr.at(1, 1), 1.0);
    EXPECT_EQ(s.frr.at(70, 70), 0.0);
    EXPECT_EQ(s.far.at(70, 70), 1.0);
}

TEST(Protocol, SurfacesMonotone)
{
    for (std::uint64_t seed : {83u, 84u, 85u}) {
        NoiseModel model;
        model.seed = seed;
        model.max_salt = 2;
        const auto s = run_protocol(separated_store(seed), model, 40, 40);
        for (int a = 1; a <= 40; ++a)
            for (int b = 1; b <= 40; ++b) {
                if (a > 1) {
                    EXPECT_LE(s.frr.at(a, b), s.frr.at(a - 1, b));
                    EXPECT_GE(s.far.at(a, b), s.far.at(a - 1, b));
                }
                if (b > 1) {
                    EXPECT_LE(s.frr.at(a, b), s.frr.at(a, b - 1));
                    EXPECT_GE(s.far.at(a, b), s.far.at(a, b - 1));
                }
            }
    }
}

TEST(Protocol, JobsDoNotChangeResult)
{
    const auto store = separated_store(86, 10);
    NoiseModel model;
    model.seed = 99;
    model.max_salt = 3;
    const auto one = collect_scores(store, model, std::nullopt, 1);
    for (int jobs : {2, 3, 8}) {
        const auto many = collect_scores(store, model, std::nullopt, jobs);
        ASSERT_EQ(many.genuine.size(), one.genuine.size());
        ASSERT_EQ(many.impostor.size(), one.impostor.size());
        for (std::size_t k = 0; k < one.genuine.size(); ++k) {
            EXPECT_EQ(many.genuine[k].gm1, one.genuine[k].gm1);
            EXPECT_EQ(many.genuine[k].gm2, one.genuine[k].gm2);
        }
        for (std::size_t k = 0; k < one.impostor.size(); ++k) {
            EXPECT_EQ(many.impostor[k].gm1, one.impostor[k].gm1);
            EXPECT_EQ(many.impostor[k].gm2, one.impostor[k].gm2);
        }
    }
}

TEST(Protocol, NeedsTwoFingers)
{
    auto store = separated_store(87, 2);
    store.resize(3);
    EXPECT_THROW(collect_scores(store, NoiseModel{}), Error);
    EXPECT_THROW(build_surfaces(ProtocolScores{}, 0, 5), Error);
}

TEST(Eer, LinearCrossing)
{
    // FAR rises with t1 and FRR falls; they meet at t1 = 35.5 with rate 0.5.
    const auto s = surfaces_from(70, [](int a, int) { return (a - 1) / 69.0; },
                                 [](int a, int) { return (70 - a) / 69.0; });
    const auto r = eer_report(s);
    EXPECT_TRUE(r.contour_found);
    EXPECT_NEAR(r.eer, 0.5, 1e-12);
    EXPECT_NEAR(r.t1_real, 35.5, 1e-12);
    EXPECT_NEAR(r.chi_square, 0.5, 1e-12);
}

TEST(Eer, ConstantSurfaces)
{
    const auto s = surfaces_from(10, [](int, int) { return 0.5; }, [](int, int) { return 0.5; });
    const auto r = eer_report(s);
    EXPECT_DOUBLE_EQ(r.eer, 0.5);
    EXPECT_DOUBLE_EQ(r.far_at_int, 0.5);
    EXPECT_DOUBLE_EQ(r.frr_at_int, 0.5);
}

TEST(Eer, ChiSquareOracle)
{
    // 2 * 0.0179^2
    const double e = 0.0179;
    const auto s = surfaces_from(3, [&](int, int) { return e; }, [&](int, int) { return e; });
    EXPECT_NEAR(eer_report(s).chi_square, 0.00064082, 1e-8);
}

TEST(Eer, NoContourFallsBackToSmallestGap)
{
    const auto s = surfaces_from(5, [](int a, int) { return 0.1 * a; }, [](int a, int) { return 0.8 + 0.01 * a; });
    const auto r = eer_report(s);
    EXPECT_FALSE(r.contour_found);
    EXPECT_EQ(r.t1_int, 5);
    EXPECT_NEAR(r.eer, 0.5 * (0.5 + 0.85), 1e-12);
}

TEST(Eer, ZeroOperatingPoints)
{
    const auto s = surfaces_from(20, [](int a, int) { return a <= 5 ? 0.0 : (a - 5) / 15.0; },
                                 [](int a, int) { return a >= 15 ? 0.0 : (15 - a) / 14.0; });
    const auto r = eer_report(s);
    EXPECT_EQ(r.zero_fmr_t1, 5);
    EXPECT_NEAR(r.zero_fmr, 10 / 14.0, 1e-12);
    EXPECT_EQ(r.zero_fnmr_t1, 15);
    EXPECT_NEAR(r.zero_fnmr, 10 / 15.0, 1e-12);
    EXPECT_GE(r.eer, 0.0);
    EXPECT_LE(r.eer, 1.0);
}

TEST(Roc, LogScaleAndSkipsZeros)
{
    const auto s = surfaces_from(4, [](int a, int) { return a == 1 ? 0.0 : (a == 2 ? 0.01 : 1.0); },
                                 [](int a, int) { return a == 4 ? 0.0 : 1.0; });
    const auto pts = emit_roc(s, 1);
    ASSERT_EQ(pts.size(), 2u);
    EXPECT_EQ(pts[0].t1, 2);
    EXPECT_NEAR(pts[0].log_far, 0.0, 1e-12);
    EXPECT_NEAR(pts[0].log_frr, 2.0, 1e-12);
    EXPECT_NEAR(pts[1].log_far, 2.0, 1e-12);
    EXPECT_THROW(emit_roc(s, 0), Error);
    EXPECT_THROW(emit_roc(s, 5), Error);
}

TEST(Csv, SurfaceLayout)
{
    RateSurface s(2, 3);
    s.at(2, 3) = 0.25;
    const auto csv = surface_csv(s);
    EXPECT_EQ(csv.rfind("t1,t2,rate\n", 0), 0u);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
    EXPECT_NE(csv.find("2,3,0.25\n"), std::string::npos);
    EXPECT_EQ(roc_csv({}), "t1,far,frr,log_far,log_frr\n");
}
