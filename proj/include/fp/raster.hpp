#pragma once

#include <vector>

#include "fp/errors.hpp"

namespace fp {

enum class PaddingMode { Replicate, Zero };

// Row-major grayscale raster of doubles. pixel (x, y) lives at pixels[y * width + x].
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;

    GrayImage() = default;
    GrayImage(int w, int h, double fill = 0.0)
        : width(w), height(h), pixels(static_cast<size_t>(w) * h, fill) {}

    double& at(int x, int y) { return pixels[static_cast<size_t>(y) * width + x]; }
    double at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }
    size_t size() const { return pixels.size(); }
    bool same_shape(const GrayImage& o) const { return width == o.width && height == o.height; }
};

// Dense convolution kernel, row-major taps[j * kw + i]. The anchor is
// ((kw - 1) / 2, (kh - 1) / 2), which is the center for odd sizes.
struct Kernel {
    int kw = 0;
    int kh = 0;
    std::vector<double> taps;

    Kernel() = default;
    Kernel(int w, int h, double fill = 0.0)
        : kw(w), kh(h), taps(static_cast<size_t>(w) * h, fill) {}

    static Kernel ones(int w) { return Kernel(w, w, 1.0); }

    double& tap(int i, int j) { return taps[static_cast<size_t>(j) * kw + i]; }
    double tap(int i, int j) const { return taps[static_cast<size_t>(j) * kw + i]; }
};

// True convolution: out(x, y) = sum_{u,v} taps(u, v) * in(x - u, y - v),
// with (u, v) measured from the kernel anchor. Border samples are resolved
// by `pad`. Throws KernelTooLarge if the kernel exceeds the image in either
// dimension, InvalidKernel on empty kernels or tap/size disagreement.
GrayImage conv2d(const GrayImage& image, const Kernel& kernel,
                 PaddingMode pad = PaddingMode::Replicate);

// Sliding w x w sum with replicate padding. Matches
// conv2d(image, Kernel::ones(w), Replicate) bit for bit.
GrayImage box_sum(const GrayImage& image, int w);

// Integer nearest-neighbor upsampling: out(x, y) = in(x / f, y / f).
GrayImage upsample_nearest(const GrayImage& image, int factor);

} // namespace fp
