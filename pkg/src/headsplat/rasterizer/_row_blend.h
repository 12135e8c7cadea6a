#ifndef HEADSPLAT_ROW_BLEND_H
#define HEADSPLAT_ROW_BLEND_H

#include <stdint.h>

/* One tile row of front-to-back alpha blending for a single fragment.
 *
 * frag columns: mean x, mean y, conic a, b, c, r, g, b, alpha, radius.
 * trans/accr/accg/accb point at the row's pixels. Saturated or skipped
 * pixels receive weight zero, which leaves their state bit-for-bit
 * untouched, so this matches the naive guarded loop exactly while staying
 * branch-free and auto-vectorizable.
 *
 * exp() is evaluated as 2^n * exp(g) with |g| <= ln(2)/2 and a degree-6
 * Taylor polynomial; the relative error (~1e-8) is below float32
 * resolution, making it interchangeable with libm expf here.
 *
 * Returns nonzero while any pixel in the row is still unsaturated.
 */
static inline int hs_blend_row(const float* frag, float dy, const float* colx,
                               float* restrict trans, float* restrict accr,
                               float* restrict accg, float* restrict accb,
                               int tw) {
    const float mx = frag[0], ca = frag[2], cb = frag[3], cc = frag[4];
    const float fr = frag[5], fg = frag[6], fb = frag[7], al = frag[8];
    const float half_cydy = 0.5f * cc * dy * dy;
    const float cbdy = cb * dy;
    int alive = 0;
    int j;
    for (j = 0; j < tw; ++j) {
        float dx = colx[j] - mx;
        float power = -0.5f * ca * dx * dx - half_cydy - cbdy * dx;
        float et = (power > -6.0f ? power : -6.0f) * 1.44269504088896341f;
        /* et+256.5 is positive, so truncation is floor(et+0.5) */
        int ni = (int)(et + 256.5f) - 256;
        float g = (et - (float)ni) * 0.693147180559945309f;
        float p = 1.0f + g * (1.0f + g * (0.5f + g * (0.16666666666666666f
                  + g * (0.041666666666666664f + g * (0.0083333333333333332f
                  + g * 0.0013888888888888889f)))));
        union { float f; uint32_t u; } bits;
        bits.u = (uint32_t)(127 + ni) << 23;
        float ap = al * (p * bits.f);
        ap = ap < 0.99f ? ap : 0.99f;
        float t = trans[j];
        float w = ap;
        w = power >= -5.545177f ? w : 0.0f; /* exp < 1/255: opacity skip */
        w = ap >= 0.00392156862745098f ? w : 0.0f;
        w = t >= 1e-4f ? w : 0.0f;
        float contrib = w * t;
        accr[j] += fr * contrib;
        accg[j] += fg * contrib;
        accb[j] += fb * contrib;
        t = t * (1.0f - w);
        trans[j] = t;
        alive |= (t >= 1e-4f);
    }
    return alive;
}

#endif
