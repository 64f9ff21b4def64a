#include "fp/raster.hpp"

#include <algorithm>
#include <string>

namespace fp {

namespace {

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

void check_kernel(const GrayImage& image, const Kernel& k) {
    if (k.kw <= 0 || k.kh <= 0 || k.taps.size() != static_cast<size_t>(k.kw) * k.kh)
        throw InvalidKernel("kernel has invalid shape or tap count");
    if (k.kw > image.width || k.kh > image.height)
        throw KernelTooLarge("kernel " + std::to_string(k.kw) + "x" + std::to_string(k.kh) +
                             " exceeds image " + std::to_string(image.width) + "x" +
                             std::to_string(image.height));
}

} // namespace

GrayImage conv2d(const GrayImage& image, const Kernel& k, PaddingMode pad) {
    check_kernel(image, k);
    const int W = image.width, H = image.height;
    const int cx = (k.kw - 1) / 2, cy = (k.kh - 1) / 2;
    GrayImage out(W, H);

    // Accumulation order (tap-row partial sums added in j order) is part of the
    // contract: box_sum reproduces it exactly.
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            double acc = 0.0;
            for (int j = 0; j < k.kh; ++j) {
                const int sy = y - j + cy;
                const double* trow = &k.taps[static_cast<size_t>(j) * k.kw];
                double row = 0.0;
                if (pad == PaddingMode::Replicate) {
                    const double* irow = &image.pixels[static_cast<size_t>(clampi(sy, 0, H - 1)) * W];
                    if (x - k.kw + 1 + cx >= 0 && x + cx < W) {
                        const double* p = irow + (x + cx);
                        for (int i = 0; i < k.kw; ++i) row += trow[i] * p[-i];
                    } else {
                        for (int i = 0; i < k.kw; ++i) row += trow[i] * irow[clampi(x - i + cx, 0, W - 1)];
                    }
                } else {
                    if (sy < 0 || sy >= H) {
                        out.at(x, y) = acc; // row contributes nothing, keep order
                        continue;
                    }
                    const double* irow = &image.pixels[static_cast<size_t>(sy) * W];
                    for (int i = 0; i < k.kw; ++i) {
                        const int sx = x - i + cx;
                        if (sx >= 0 && sx < W) row += trow[i] * irow[sx];
                    }
                }
                acc += row;
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

GrayImage box_sum(const GrayImage& image, int w) {
    if (w < 1) throw InvalidKernel("box_sum window must be >= 1");
    if (w > image.width || w > image.height)
        throw KernelTooLarge("box window " + std::to_string(w) + " exceeds image");
    const int W = image.width, H = image.height;
    const int c = (w - 1) / 2;

    // Horizontal pass, then vertical pass, each summing taps in ascending
    // order like conv2d does. With replicate padding the two factored passes
    // visit exactly the same samples in the same order, so the result is
    // bit-identical to conv2d(image, ones(w)).
    GrayImage hor(W, H);
    for (int y = 0; y < H; ++y) {
        const double* irow = &image.pixels[static_cast<size_t>(y) * W];
        for (int x = 0; x < W; ++x) {
            double row = 0.0;
            if (x - w + 1 + c >= 0 && x + c < W) {
                const double* p = irow + (x + c);
                for (int i = 0; i < w; ++i) row += p[-i];
            } else {
                for (int i = 0; i < w; ++i) row += irow[clampi(x - i + c, 0, W - 1)];
            }
            hor.at(x, y) = row;
        }
    }
    GrayImage out(W, H);
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            double acc = 0.0;
            for (int j = 0; j < w; ++j) acc += hor.at(x, clampi(y - j + c, 0, H - 1));
            out.at(x, y) = acc;
        }
    }
    return out;
}

GrayImage upsample_nearest(const GrayImage& image, int factor) {
    if (factor < 1) throw InvalidFactor("upsample factor must be >= 1");
    GrayImage out(image.width * factor, image.height * factor);
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x)
            out.at(x, y) = image.at(x / factor, y / factor);
    return out;
}

} // namespace fp
