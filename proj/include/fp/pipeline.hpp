#pragma once

#include <string>

#include "fp/enhancement.hpp"
#include "fp/extraction.hpp"
#include "fp/losses.hpp"
#include "fp/normalize.hpp"
#include "fp/orientation.hpp"
#include "fp/segmentation.hpp"

namespace fp {

// Full run configuration. Every field has a workable default; load_config /
// parse_config overlay dotted key=value pairs onto these defaults (the key
// for each field is listed on its right).
struct PipelineConfig {
    NormParams norm;                        // norm.m0, norm.v0
    int window_w = 16;                      // window.w
    int orientation_bins = 90;              // orientation.bins
    int orientation_stride = 8;             // orientation.stride
    double gabor_period = 9.0;              // gabor.period
    double gabor_sigma = 4.5;               // gabor.sigma
    int gabor_ksize = 25;                   // gabor.ksize
    int gabor_bins = 90;                    // gabor.bins (must equal orientation.bins)
    SegClassifier seg_classifier = SegClassifier::defaults();
    double seg_threshold = kSegScoreThreshold; // seg.threshold
    int seg_stride = 8;                     // seg.stride
    int extract_k = 16;                     // extract.k
    double extract_threshold = 0.5;         // extract.threshold
    double extract_nms_radius = 16.0;       // extract.nms_radius
    int direction_bins = 180;               // direction.bins
    double direction_sigma = 5.0;           // direction.sigma
    LossWeights loss_weights = default_loss_weights(); // loss.<component>
};

// Cross-field checks that single stages cannot see: gabor.bins must equal
// orientation.bins, norm.v0 must be positive, strides/bins/kernel sizes must
// be positive (ksize odd). Throws ConfigError.
void validate_config(const PipelineConfig& cfg);

// Every intermediate of a run, mutually consistent in size. seg holds the
// stride-cell score map (ceil(W/stride) x ceil(H/stride)); seg_mask is its
// binarized form expanded back to full resolution. maps share the seg grid
// shape when seg.stride is 8.
struct PipelineArtifacts {
    GrayImage normalized;
    OrientationField field;
    SegmentationMap seg;
    GrayImage seg_mask;
    EnhancedMap enhanced;
    MinutiaeList minutiae;
    MinutiaeMaps maps;
    int cell_collisions = 0;
};

// normalize -> gradients/structure tensor -> orientation field -> feature
// classification/segmentation -> oriented bandpass enhancement -> template
// scoring/extraction -> coarse map encoding. Deterministic and side-effect
// free. Throws ShapeMismatch when the image is smaller than 64x64; any stage
// failure is rethrown as PipelineError naming the stage.
PipelineArtifacts run(const GrayImage& image, const PipelineConfig& cfg = {});

// Applies one dotted config key (the same names the file format uses) to an
// existing config. Unknown keys throw ConfigError; malformed values throw
// ParseError mentioning `context` (parse_config passes "line N"; a CLI can
// pass the flag name). Cross-field checks are deferred to validate_config.
void set_config_key(PipelineConfig& cfg, const std::string& key, const std::string& value,
                    const std::string& context = "value");

// Plain-text configuration: one "key=value" per line, blank lines and lines
// starting with '#' ignored. Keys are the dotted names listed next to
// PipelineConfig's fields; loss weights are "loss.<component>". Unknown keys
// throw ConfigError; malformed values throw ParseError naming the 1-based
// line. The parsed config is validated before being returned.
PipelineConfig parse_config(const std::string& text);

// parse_config over a file's contents. Throws IoError when unreadable.
PipelineConfig load_config(const std::string& path);

} // namespace fp
