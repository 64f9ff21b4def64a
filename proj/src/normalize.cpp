#include "fp/normalize.hpp"

#include <cmath>

namespace fp {

double image_mean(const GrayImage& image) {
    if (image.size() == 0) throw DegenerateImage("mean of empty image");
    double sum = 0.0;
    for (double p : image.pixels) sum += p;
    return sum / static_cast<double>(image.size());
}

double image_variance(const GrayImage& image) {
    const double m = image_mean(image);
    double sum = 0.0;
    for (double p : image.pixels) sum += (p - m) * (p - m);
    return sum / static_cast<double>(image.size());
}

GrayImage normalize(const GrayImage& image, const NormParams& params) {
    if (params.v0 <= 0.0) throw Error("normalize: v0 must be positive");
    const double m = image_mean(image);
    const double v = image_variance(image);
    if (v < 1e-12) throw DegenerateImage("normalize: image variance is zero");

    GrayImage out(image.width, image.height);
    const double ratio = params.v0 / v;
    for (size_t i = 0; i < image.size(); ++i) {
        const double d = image.pixels[i] - m;
        const double shift = std::sqrt(d * d * ratio);
        out.pixels[i] = image.pixels[i] > m ? params.m0 + shift : params.m0 - shift;
    }
    return out;
}

} // namespace fp
