#pragma once

#include <vector>

#include "fp/enhancement.hpp"
#include "fp/minutiae.hpp"
#include "fp/orientation.hpp"
#include "fp/raster.hpp"

namespace fp {

// Ridge-ending matched filters. Template t is tagged with directions[t]
// degrees in [0, 360); the set covers the circle uniformly. Every kernel is
// zero-mean and unit-norm, so a plain dot product against a window is already
// the numerator of a normalized correlation.
struct TemplateBank {
    std::vector<Kernel> templates;
    std::vector<double> directions;
    double period = 9.0;

    int size() const { return static_cast<int>(templates.size()); }
};

// Builds k directed ending templates of size ksize x ksize for the given
// ridge period: the cosine of a Gaussian-windowed ridge wave whose phase is
// augmented by a unit winding about the center, phased so the bright ray
// leaves along direction a,
//   tap(d) = exp(-|d|^2 / (2 sigma^2))
//            * cos(2 pi / period * <d, e_{a+90}> + atan2(dy, dx) - a),
// with sigma = period / 2, the center tap set to 0, then shifted to zero
// mean and scaled to unit norm. Sweeping a over the full circle covers both
// winding signs and both contrast polarities, so the maximum response over
// the bank detects any ending regardless of its local carrier phase. Throws
// InvalidKernel when k < 4, ksize is even or < 3, or period <= 0.
TemplateBank template_bank(int k = 16, int ksize = 25, double period = 9.0);

// Per-pixel template response. Every template is correlated with both the
// image window and its negation (ridge/valley duality: an inverted-contrast
// ending terminates along the same axis), and the stronger magnitude wins.
// score is the maximum over the bank of |normalized cross-correlation|,
// clamped to [0, 1]; windows with a degenerate standard deviation score 0.
// direction carries the winning template's tag in degrees.
// Pixels where seg is zero are forced to score 0, direction 0.
struct ScoreMap {
    GrayImage score;
    GrayImage direction;
};

// ridge is the cosine of the enhanced phase (or any ridge-contrast raster).
// seg is a 0/1 mask of the same shape. Throws ShapeMismatch on size
// disagreement, InvalidKernel if the bank is empty or its kernels are not
// uniformly sized odd squares, KernelTooLarge if they exceed the image.
ScoreMap minutiae_score(const GrayImage& ridge, const TemplateBank& bank, const GrayImage& seg);
ScoreMap minutiae_score(const EnhancedMap& e, const TemplateBank& bank, const GrayImage& seg);

// Pixels whose score exceeds `threshold` and strictly dominates their eight
// neighbors; on equal neighbor scores the pixel earlier in ascending
// (x, then y) order wins. Results carry the pixel position, the direction
// raster's tag, and the score.
MinutiaeList score_peaks(const ScoreMap& sm, double threshold);

// Greedy radius suppression: process by descending score (ties ascending x,
// then y), keep a minutia iff every already-kept one is strictly farther
// than `radius` away. Output stays in processing order (score descending).
MinutiaeList nms(MinutiaeList list, double radius);

// Optional direction re-estimator: reads the winding sign off the phase
// circulation around (x, y), fits the local plane wave (normal direction and
// center phase), and follows the fitted model's bright ray outward one period
// with trace_spiral_ray — the same convention that defines ground-truth
// directions. Returns fallback_deg when the spot has no clear winding or the
// fit degenerates. extract() does not call this; it reports the template tag.
double refine_minutia_direction(const EnhancedMap& e, double x, double y, double period,
                                double fallback_deg);

// threshold-peaks-suppress on top of minutiae_score: keep pixels whose score
// exceeds threshold and is a strict 8-neighborhood maximum, then apply nms.
// Directions and scores come from the score/direction rasters.
MinutiaeList extract(const EnhancedMap& e, const TemplateBank& bank, const GrayImage& seg,
                     double threshold = 0.5, double nms_radius = 16.0);

// Cell edge of the coarse minutiae maps, in pixels.
inline constexpr int kMinutiaeCellSize = 8;

// Per-cell probability vectors over within-cell positions.
// probs[(y * width + x) * bins + b].
struct OffsetDistribution {
    int width = 0, height = 0;
    int bins = kMinutiaeCellSize;
    std::vector<double> probs;

    double at(int x, int y, int b) const {
        return probs[(static_cast<size_t>(y) * width + x) * bins + b];
    }
    double& at(int x, int y, int b) {
        return probs[(static_cast<size_t>(y) * width + x) * bins + b];
    }
};

// Coarse (1/8 scale, ceil) minutiae representation: per cell a presence
// score in [0, 1], distributions over the x and y position inside the cell,
// and a direction distribution over the full circle.
struct MinutiaeMaps {
    GrayImage score;
    OffsetDistribution xoff;
    OffsetDistribution yoff;
    AngleDistribution direction; // span 360
};

// Default direction coding for minutiae maps: 2-degree bins on the circle.
inline constexpr AngleCoding kDirectionCoding{180, 360, 5.0};

// Rasterizes a minutiae list into maps for a width x height image. Each
// minutia is rounded to integer pixels; its cell gets score 1, one-hot
// x/y offsets, and encode_angle of its direction. Untouched cells hold score
// 0 and uniform distributions. When two minutiae round into one cell the
// later one wins and *collisions (when given) is incremented once per
// overwrite. Throws OutOfBounds for coordinates outside the image,
// UnsupportedSpan unless dir_coding.span == 360, AngleOutOfRange for
// directions outside [0, 360).
MinutiaeMaps encode_minutiae_maps(const MinutiaeList& list, int width, int height,
                                  const AngleCoding& dir_coding = kDirectionCoding,
                                  int* collisions = nullptr);

// Cells scoring above `threshold` become minutiae at
// (8 cx + argmax xoff, 8 cy + argmax yoff) (first maximum on ties), with
// decode_theta_max direction and the cell score, then nms. Throws
// ShapeMismatch if the four maps disagree in size.
MinutiaeList decode_minutiae_maps(const MinutiaeMaps& maps, double threshold = 0.5,
                                  double nms_radius = 16.0);

} // namespace fp
