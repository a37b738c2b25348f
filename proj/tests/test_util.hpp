#pragma once

#include <string>
#include <vector>

#include "minutia/minutia.hpp"

namespace testutil {

inline minutia::MinutiaeTable fixture(const std::string& name)
{
    return minutia::read_mtab(std::string(MINUTIA_TEST_DATA) + "/" + name + ".mtab");
}

inline minutia::GrayImage random_image(minutia::SplitMix64& rng, int max_side = 40)
{
    minutia::GrayImage img(1 + static_cast<int>(rng.randint(static_cast<std::uint64_t>(max_side))),
                           1 + static_cast<int>(rng.randint(static_cast<std::uint64_t>(max_side))));
    for (auto& v : img.pixels())
        v = static_cast<std::uint8_t>(rng.randint(256));
    return img;
}

inline minutia::MinutiaeTable random_table(minutia::SplitMix64& rng, int max_rows = 24, int max_count = 15)
{
    minutia::MinutiaeTable t;
    t.rows.resize(1 + rng.randint(static_cast<std::uint64_t>(max_rows)));
    for (auto& r : t.rows) {
        r.term = static_cast<int>(rng.randint(static_cast<std::uint64_t>(max_count) + 1));
        r.bif = static_cast<int>(rng.randint(static_cast<std::uint64_t>(max_count) + 1));
    }
    return t;
}

inline minutia::Skeleton skeleton_from(const std::vector<std::string>& rows)
{
    minutia::Skeleton s(static_cast<int>(rows.front().size()), static_cast<int>(rows.size()), 0);
    for (int r = 0; r < s.height(); ++r)
        for (int c = 0; c < s.width(); ++c)
            s(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] == '1' ? 1 : 0;
    return s;
}

} // namespace testutil
