#pragma once

#include "fp/raster.hpp"

namespace fp {

struct NormParams {
    double m0 = 0.0; // target mean
    double v0 = 1.0; // target variance, must be > 0
};

double image_mean(const GrayImage& image);
double image_variance(const GrayImage& image); // population variance

// Pixel-wise mean/variance correction: pixels above the image mean map to
// m0 + sqrt((I - m)^2 * v0 / v), the rest to m0 - sqrt(...). Pixels equal to
// the mean land on m0. Throws DegenerateImage when the input variance is
// (numerically) zero.
GrayImage normalize(const GrayImage& image, const NormParams& params = {});

} // namespace fp
