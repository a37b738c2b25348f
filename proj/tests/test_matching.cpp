#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "test_util.hpp"

using namespace minutia;
using testutil::fixture;

namespace {

std::vector<MinutiaeTable> gallery_of(std::initializer_list<const char*> names)
{
    std::vector<MinutiaeTable> g;
    for (const char* n : names)
        g.push_back(fixture(n));
    return g;
}

double geometric_mean(const std::vector<int>& v)
{
    double p = 1.0;
    for (int x : v)
        p *= std::max(x, 2);
    return std::pow(p, 1.0 / static_cast<double>(v.size()));
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& name) : path(std::filesystem::temp_directory_path() / name)
    {
        std::filesystem::remove_all(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

} // namespace

TEST(Score, Fingerprint108)
{
    const auto s = score(fixture("108_7"),
                         gallery_of({"108_1", "108_2", "108_3", "108_4", "108_5", "108_6", "108_8"}), 14);
    EXPECT_EQ(s.s1, (std::vector<int>{25, 24, 24, 26, 27, 17, 69}));
    EXPECT_EQ(s.s2, (std::vector<int>{9, 9, 10, 15, 11, 7, 6}));
    EXPECT_NEAR(s.gm1, 27.488, 0.001);
    EXPECT_NEAR(s.gm2, 9.2082, 0.001);
}

TEST(Score, GenuineNoisyProbe)
{
    const auto s = score(fixture("101_1_noisy"), gallery_of({"101_1", "101_2", "101_3"}));
    EXPECT_EQ(s.s1, (std::vector<int>{2, 17, 17}));
    EXPECT_EQ(s.s2, (std::vector<int>{3, 8, 7}));
    EXPECT_NEAR(s.gm1, 8.33, 0.01);
    EXPECT_NEAR(s.gm2, 5.52, 0.01);
    EXPECT_EQ(verify(s, Thresholds{17, 8}), Decision::accept);
}

TEST(Score, ImpostorNoisyProbe)
{
    const auto s = score(fixture("101_1_noisy"), gallery_of({"103_1", "103_2", "103_3"}));
    EXPECT_EQ(s.s1, (std::vector<int>{26, 23, 16}));
    EXPECT_EQ(s.s2, (std::vector<int>{14, 13, 13}));
    EXPECT_NEAR(s.gm1, 21.23, 0.01);
    EXPECT_NEAR(s.gm2, 13.33, 0.01);
    EXPECT_EQ(verify(s, Thresholds{17, 8}), Decision::reject);
}

TEST(Score, TruncatesToShortestTable)
{
    MinutiaeTable a, b;
    a.rows = {{1, 0}, {1, 0}, {9, 9}};
    b.rows = {{0, 0}, {0, 0}};
    const auto s = score(a, {b});
    EXPECT_EQ(s.s1, (std::vector<int>{2}));
    EXPECT_EQ(s.s2, (std::vector<int>{0}));
    EXPECT_THROW(score(a, {}), Error);
    EXPECT_THROW(score(a, {MinutiaeTable{}}), Error);
}

TEST(Score, GeometricMeanOracle)
{
    SplitMix64 rng(61);
    for (int n = 0; n < 100; ++n) {
        const auto probe = testutil::random_table(rng);
        std::vector<MinutiaeTable> g;
        for (int k = 0, m = 1 + static_cast<int>(rng.randint(8)); k < m; ++k)
            g.push_back(testutil::random_table(rng));
        const auto s = score(probe, g);
        EXPECT_NEAR(s.gm1, geometric_mean(s.s1), 1e-9 * s.gm1);
        EXPECT_NEAR(s.gm2, geometric_mean(s.s2), 1e-9 * s.gm2);
    }
}

TEST(Score, SelfMatchFloor)
{
    SplitMix64 rng(62);
    for (int n = 0; n < 50; ++n) {
        const auto t = testutil::random_table(rng);
        const auto s = score(t, {t});
        EXPECT_EQ(s.gm1, 2.0);
        EXPECT_EQ(s.gm2, 2.0);
        EXPECT_EQ(verify(s, Thresholds{2, 2}), Decision::accept);
    }
}

TEST(Verify, BoundaryInclusive)
{
    MatchScore s;
    s.gm1 = 17.0;
    s.gm2 = 8.0;
    EXPECT_EQ(verify(s, Thresholds{17, 8}), Decision::accept);
    s.gm2 = 8.0001;
    EXPECT_EQ(verify(s, Thresholds{17, 8}), Decision::reject);
    EXPECT_STREQ(to_string(Decision::accept), "ACCEPT");
    EXPECT_STREQ(to_string(Decision::reject), "REJECT");
}

TEST(Enroll, BlankImageFails)
{
    try {
        enroll(GrayImage(200, 200, 255));
        FAIL() << "expected failure to enroll";
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("failure to enroll"), std::string::npos);
    }
}

TEST(Enroll, LoopPrintProducesTable)
{
    synth::FingerprintSpec spec;
    spec.cx = 128.3;
    spec.cy = 110.3;
    const auto t = enroll_trace(synth::fingerprint(spec));
    EXPECT_FALSE(t.table.empty());
    EXPECT_EQ(t.table.total(), static_cast<int>(t.minutiae.size()));
    EXPECT_LE(std::hypot(t.core.x - spec.cx, t.core.y - spec.cy), 16.0);
    for (int r = 0; r < t.skeleton.height(); ++r)
        for (int c = 0; c < t.skeleton.width(); ++c)
            if (t.skeleton(r, c))
                EXPECT_TRUE(t.enhanced.mask(r, c));
}

TEST(Enroll, DeterministicBothThinners)
{
    synth::FingerprintSpec spec;
    spec.cx = 126.7;
    spec.cy = 108.4;
    spec.noise_sigma = 5;
    const auto img = synth::fingerprint(spec);
    for (auto algo : {ThinAlgorithm::gray, ThinAlgorithm::baseline}) {
        EnrollOptions opt;
        opt.thinner = algo;
        EXPECT_EQ(enroll(img, opt), enroll(img, opt));
    }
}

TEST(Store, PutLoadAndGallery)
{
    TempDir dir("minutia_store_test");
    TemplateStore store(dir.path);
    SplitMix64 rng(63);
    std::vector<Template> put;
    for (const char* f : {"102", "101"})
        for (int p = 3; p >= 1; --p) {
            Template t{f, p, testutil::random_table(rng)};
            store.put(t);
            put.push_back(t);
        }
    const auto all = store.load_all();
    ASSERT_EQ(all.size(), 6u);
    EXPECT_EQ(all.front().finger_id, "101");
    EXPECT_EQ(all.front().print_no, 1);
    EXPECT_EQ(all.back().finger_id, "102");
    EXPECT_EQ(all.back().print_no, 3);
    EXPECT_EQ(store.gallery("101").size(), 3u);
    EXPECT_THROW(store.gallery("999"), Error);
    EXPECT_THROW(store.put({"a_b", 1, put.front().table}), Error);
    std::size_t m = 1000;
    for (const auto& t : put)
        m = std::min(m, t.table.size());
    EXPECT_EQ(store.global_min_rows(), m);
}

TEST(Store, MissingDirectory)
{
    EXPECT_THROW(TemplateStore("/nonexistent/minutia/store").load_all(), Error);
}
