// End-to-end walk through the library on a generated print:
// enrollment, self-verification, and hiding the table in the image.

#include <cstdio>

#include "minutia/minutia.hpp"

using namespace minutia;

int main()
{
    synth::FingerprintSpec spec;
    spec.cx = 128.3;
    spec.cy = 110.3;
    spec.noise_sigma = 6.0;
    const GrayImage print = synth::fingerprint(spec);

    try {
        const auto trace = enroll_trace(print);
        std::printf("core at (%d, %d), %zu minutiae, %zu tracks\n", trace.core.x, trace.core.y,
                    trace.minutiae.size(), trace.table.size());
        std::fputs(format_mtab(trace.table).c_str(), stdout);

        const auto s = score(trace.table, {trace.table});
        std::printf("self match: %s gm1=%.2f gm2=%.2f\n", to_string(verify(s, Thresholds{})), s.gm1, s.gm2);

        MinutiaeTable hidden = trace.table;
        for (auto& r : hidden.rows) {
            r.term = std::min(r.term, kMaxEncodableCount);
            r.bif = std::min(r.bif, kMaxEncodableCount);
        }
        EmbedParams p;
        const auto bits = encode_table(hidden);
        const auto marked = embed(print, bits, p);
        const auto ex = extract(marked, p, bits.size());
        std::printf("watermark: similarity %.3f, bit accuracy %.2f%%, table %s\n", similarity(print, marked),
                    bit_accuracy(bits, ex.bits), decode_table(ex.bits) == hidden ? "recovered" : "damaged");
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
