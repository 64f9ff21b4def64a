#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "fp/minutiae.hpp"
#include "fp/orientation.hpp"
#include "fp/raster.hpp"

namespace fp {

// A feature point to plant: a phase spiral of winding +1 or -1 at (x, y).
struct PlantedMinutia {
    double x = 0.0;
    double y = 0.0;
    int polarity = 1;
};

struct SynthSpec {
    int width = 256;
    int height = 256;
    double orientation_deg = 0.0;            // ridge angle, used when field is absent
    std::optional<OrientationField> field;   // per-cell ridge angles (locally planar waves)
    double period = 9.0;                     // ridge period in pixels
    double global_phase = 0.0;               // radians
    double amplitude = 1.0;
    double noise_sigma = 0.0;                // additive Gaussian noise
    std::vector<PlantedMinutia> minutiae;
};

struct SynthResult {
    GrayImage image;
    MinutiaeList ground_truth; // same order as SynthSpec::minutiae, scores 1.0
};

// Noiseless phase model: a plane wave perpendicular to the ridge orientation
// plus one atan2 spiral per planted minutia.
double synth_phase(const SynthSpec& spec, double x, double y);

// Follows the bright ray of a winding-`polarity` spiral at (cx, cy) riding on
// the given carrier phase: marches outward to radius `period` while holding
// carrier + polarity * gamma at zero modulo 2 pi, and returns the endpoint's
// polar angle in radians. This fixes the direction convention for every
// ground-truth and refined minutia direction in this library.
double trace_spiral_ray(const std::function<double(double, double)>& carrier, double cx,
                        double cy, double period, int polarity);

// Renders amplitude * cos(phase) + noise. Noise is seeded and deterministic;
// it never affects the ground-truth list. Each planted minutia becomes a
// ground-truth entry whose direction is found by tracing the bright ridge
// that terminates at the spiral, evaluated one period out.
SynthResult synth_print(const SynthSpec& spec, uint64_t seed);

struct LabeledPatch {
    GrayImage image;
    int label = 0; // 1 ridge foreground, 0 background
};

// ceil(n/2) ridge patches followed by floor(n/2) background patches (flat or
// noise), 48x48 each, parameters drawn deterministically from the seed.
std::vector<LabeledPatch> synth_patch_dataset(int n, uint64_t seed);

} // namespace fp
