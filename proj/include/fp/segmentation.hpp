#pragma once

#include <array>
#include <vector>

#include "fp/minutiae.hpp"
#include "fp/orientation.hpp"
#include "fp/raster.hpp"
#include "fp/synth.hpp"

namespace fp {

// Per-pixel foreground evidence: gradient coherence plus local first and
// second moments over a w x w window (replicate-padded).
struct SegFeatures {
    GrayImage coh, mean, var;
    int window = 0;
};

// Pixel-wise affine score on [coh, mean, var]. Scores are logits: > 0 means
// foreground under the default decision rule.
struct SegClassifier {
    std::array<double, 3> weights{0.0, 0.0, 0.0};
    double bias = 0.0;

    // Fitted offline on synth_patch_dataset via fit_seg_classifier; see
    // `fpx fit-seg` for the reproducible procedure.
    static SegClassifier defaults();
};

inline constexpr double kSegScoreThreshold = 0.0;

struct SegmentationMap {
    GrayImage scores;
    int stride = 1;
};

SegFeatures seg_features(const GrayImage& image, const StructureTensor& t, int window = 16);

// scores = w0*coh + w1*mean + w2*var + bias at stride 1.
SegmentationMap seg_classify(const SegFeatures& f, const SegClassifier& c);

// Averages scores over stride x stride cells (partial cells average what is
// present); ceil(W/stride) x ceil(H/stride) output.
SegmentationMap pool_scores(const SegmentationMap& m, int stride);

// score > threshold -> 1 else 0.
GrayImage seg_binarize(const SegmentationMap& m, double threshold = kSegScoreThreshold);

// Pixels whose center lies in the convex hull of the minutiae positions or
// within half a pixel of it. Throws EmptyMinutiae on an empty list.
GrayImage convex_hull_mask(const MinutiaeList& minutiae, int width, int height);

// Morphological dilation by a Euclidean disk: output = {p : dist(p, fg) <= r}.
// Exact (squared-distance transform), radius 0 is the identity.
GrayImage dilate_disk(const GrayImage& mask, double radius);

// One pass of a 3x3 binary majority vote with the center counted twice
// (keeps convex corners); outside the image counts as background.
GrayImage majority_smooth(const GrayImage& mask);

// majority_smooth(dilate_disk(convex_hull_mask(minutiae), radius)). Note the
// smoothing pass erases blobs smaller than about 2x2 pixels, so radius 0
// with a single minutia comes back empty.
GrayImage weak_seg_label(const MinutiaeList& minutiae, int width, int height,
                         double dilation_radius = 16.0);

// Sparse orientation supervision: one (cell, direction mod 180) entry per
// minutia at cell (floor(x/stride), floor(y/stride)).
struct OrientationLabel {
    int cell_x = 0, cell_y = 0;
    double theta_deg = 0.0;
};
std::vector<OrientationLabel> strong_orientation_label(const MinutiaeList& minutiae, int stride,
                                                       int width, int height);

// Logistic regression on patch-center features (full-batch gradient descent,
// standardized internally, deterministic). Labels are LabeledPatch::label.
SegClassifier fit_seg_classifier(const std::vector<LabeledPatch>& patches, int window = 16,
                                 int iterations = 500, double learning_rate = 0.5);

} // namespace fp
