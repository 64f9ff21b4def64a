#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fp/raster.hpp"

namespace fp {

// Windowed outer products of the image gradient.
struct StructureTensor {
    GrayImage gxx, gyy, gxy;
    int window = 0;
};

// Per-cell ridge angle in degrees, [0, 180). With stride > 1 each cell is the
// value at its center pixel; the raster is ceil(W/stride) x ceil(H/stride).
struct OrientationField {
    GrayImage angles;
    int stride = 1;
    GrayImage coherence; // optional, same shape as angles when present
    bool has_coherence() const { return coherence.size() == angles.size() && angles.size() > 0; }
};

// Layout of a discrete angle distribution: `bins` values covering [0, span)
// in steps of floor(span / bins) degrees, labels softened by a Gaussian of
// width sigma (degrees, circular distance).
struct AngleCoding {
    int bins = 90;
    int span = 180; // 180 for orientations, 360 for minutia directions
    double sigma = 5.0;
};

// Per-cell probability vectors over angle bins. probs[(y * width + x) * bins + i].
struct AngleDistribution {
    int width = 0, height = 0;
    int bins = 0;
    int span = 180;
    std::vector<double> probs;

    double at(int x, int y, int i) const {
        return probs[(static_cast<size_t>(y) * width + x) * bins + i];
    }
    double& at(int x, int y, int i) {
        return probs[(static_cast<size_t>(y) * width + x) * bins + i];
    }
};

// 3x3 Sobel derivative pair, oriented so that a ramp I(x,y) = x has positive
// x-gradient 8 in the interior. Intended for use with conv2d.
Kernel sobel_x_kernel();
Kernel sobel_y_kernel();
std::pair<GrayImage, GrayImage> sobel_gradients(const GrayImage& image);

StructureTensor structure_tensor(const GrayImage& gx, const GrayImage& gy, int window = 16);

OrientationField orientation_field(const StructureTensor& t, int stride = 1);

// (sqrt((gxx-gyy)^2 + 4 gxy^2)) / (gxx + gyy + eps), clamped to [0, 1].
GrayImage coherence(const StructureTensor& t);

// Gaussian-softened one-hot vector over circular angle bins; sums to one.
std::vector<double> encode_angle(double theta_deg, const AngleCoding& coding);

// Applies encode_angle to every cell of an angle raster.
AngleDistribution encode_angles(const GrayImage& angles, const AngleCoding& coding);

// Mode decoder: angle = floor(span/bins) * argmax p(i), ties to the lower bin.
GrayImage decode_theta_max(const AngleDistribution& dist);

// Vector-average decoder over doubled angles (span 180 only). confidence is
// the resultant length in [0, 1]; cells below kThetaAveConfidenceFloor carry
// no usable direction.
inline constexpr double kThetaAveConfidenceFloor = 0.05;
struct ThetaAveResult {
    GrayImage angles;
    GrayImage confidence;
};
ThetaAveResult decode_theta_ave(const AngleDistribution& dist);

// Text format: header "W H stride", then H rows of W angles, one decimal.
void write_orientation_field(const std::string& path, const OrientationField& field);
OrientationField read_orientation_field(const std::string& path);

double deg2rad(double d);
double rad2deg(double r);

} // namespace fp
