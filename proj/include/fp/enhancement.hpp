#pragma once

#include <vector>

#include "fp/orientation.hpp"
#include "fp/raster.hpp"

namespace fp {

// Complex Gabor bank: channel i has ridge orientation theta_i = floor(180/N)*i
// degrees and wave vector of magnitude `freq` perpendicular to it.
struct GaborBank {
    std::vector<Kernel> real, imag; // ksize x ksize taps per channel
    std::vector<double> thetas;     // degrees, strictly increasing from 0
    double freq = 0.0;              // cycles per pixel
    double sigma = 0.0;
    int ksize = 0;
    int size() const { return static_cast<int>(thetas.size()); }
};

// The complex kernel as an outer product of two complex 1D factors
// (row factor in x, column factor in y); used by the separable fast path.
struct GaborFactors {
    std::vector<double> row_re, row_im, col_re, col_im;
};
GaborFactors gabor_factors(const GaborBank& bank, int channel);

// Per-pixel phase vectors, radians in (-pi, pi]; Arg(0) = 0.
struct GroupedPhases {
    int width = 0, height = 0, channels = 0;
    std::vector<double> phases;
    double at(int x, int y, int c) const {
        return phases[(static_cast<size_t>(y) * width + x) * channels + c];
    }
    double& at(int x, int y, int c) {
        return phases[(static_cast<size_t>(y) * width + x) * channels + c];
    }
};

// Per-pixel channel weights in [0, 1]; hard masks are one-hot.
struct OrientationMask {
    int width = 0, height = 0, channels = 0;
    std::vector<double> mask;
    double at(int x, int y, int c) const {
        return mask[(static_cast<size_t>(y) * width + x) * channels + c];
    }
    double& at(int x, int y, int c) {
        return mask[(static_cast<size_t>(y) * width + x) * channels + c];
    }
};

// Selected phase field; cos(phase) renders the enhanced ridge pattern.
struct EnhancedMap {
    GrayImage phase;     // radians in (-pi, pi]
    GrayImage amplitude; // empty unless amplitudes were supplied
};

// kernel_i(x, y) = exp(-(x^2+y^2)/(2 sigma^2))
//                * exp(j * 2 pi freq * (x cos(theta_i+90) + y sin(theta_i+90)))
GaborBank gabor_bank(double freq, int n, double sigma, int ksize);

// Complex convolution of the image with every bank channel (replicate pad,
// true convolution); returns phases and fills `amplitudes` when non-null.
GroupedPhases grouped_phases(const GrayImage& image, const GaborBank& bank,
                             std::vector<GrayImage>* amplitudes = nullptr);

// Hard one-hot selection of the circularly nearest bank orientation per
// pixel (ties to the lower bin). Fields with stride > 1 are upsampled
// nearest-neighbor; width/height (default stride * cells) crop the result.
OrientationMask orientation_mask(const OrientationField& field, const GaborBank& bank,
                                 int width = -1, int height = -1);

// Soft selection: the probability vectors themselves.
OrientationMask soft_orientation_mask(const AngleDistribution& dist, const GaborBank& bank);

// E = sum_i phases_i * mask_i, renormalized into (-pi, pi]. The overload with
// amplitudes fills EnhancedMap::amplitude with the same weighted sum.
EnhancedMap enhance(const GroupedPhases& phases, const OrientationMask& mask);
EnhancedMap enhance(const GroupedPhases& phases, const OrientationMask& mask,
                    const std::vector<GrayImage>& amplitudes);

// Filters each stride x stride cell with its own channel only; equals
// enhance(grouped_phases(image, bank), orientation_mask(field, bank, W, H))
// without materializing the full stack.
EnhancedMap enhance_with_field(const GrayImage& image, const OrientationField& field,
                               const GaborBank& bank);

// cos(phase), the displayable enhanced fingerprint.
GrayImage enhanced_cosine(const EnhancedMap& map);

} // namespace fp
