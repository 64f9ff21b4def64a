#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fp/orientation.hpp"
#include "fp/raster.hpp"

namespace fp {

// Scalar training penalty plus its analytic gradient. The gradient is laid
// out exactly like the storage of the predicted map it differentiates
// (GrayImage::pixels for score rasters, AngleDistribution::probs for
// per-cell angle distributions).
struct LossValue {
    double value = 0.0;
    std::vector<double> gradient;
};

// Probability clipping applied before every log.
inline constexpr double kProbClip = 1e-7;
// Guard added to the coherence ratio's denominator.
inline constexpr double kCoherenceEps = 1e-6;

// Class-balanced cross-entropy over the cells where roi > 0:
//   value = -(1/|ROI|) * sum_ROI sum_i [ lambda_pos * l(i) * log p(i)
//                                      + lambda_neg * (1 - l(i)) * log(1 - p(i)) ]
// pred entries are clipped into [kProbClip, 1 - kProbClip] before the logs;
// entries lying outside that interval are locally constant and get zero
// gradient, as do all entries of cells outside the roi.
// The raster overload is the one-bin case (per-pixel Bernoulli labels).
// Throws ShapeMismatch when pred/label/roi disagree in shape (or bins/span),
// EmptyRoi when no roi cell is positive.
LossValue balanced_cross_entropy(const AngleDistribution& pred, const AngleDistribution& label,
                                 const GrayImage& roi, double lambda_pos, double lambda_neg);
LossValue balanced_cross_entropy(const GrayImage& pred, const GrayImage& label,
                                 const GrayImage& roi, double lambda_pos, double lambda_neg);

// Default class balance for a label map: lambda_pos = 1 and lambda_neg =
// (positive label mass) / (negative label mass) inside the roi, so the two
// terms contribute equally for a calibrated predictor. Degenerate masses
// (no negatives) fall back to lambda_neg = 1. Throws like the loss itself.
std::pair<double, double> balanced_lambdas(const AngleDistribution& label, const GrayImage& roi);
std::pair<double, double> balanced_lambdas(const GrayImage& label, const GrayImage& roi);

// Alignment penalty on an orientation distribution map (span 180 only).
// Each cell contributes its averaging vector d = (1/bins) * sum_i p(i) *
// (cos, sin)(2 * floor(span/bins) * i degrees) — the decode_theta_ave
// convention. For every cell, a zero-padded 3x3 window is reduced to
//   coh = |sum of d| / (sum of |d| + kCoherenceEps),
// and value = |ROI| / (sum of coh over roi cells) - 1, which is >= 0 and
// approaches 0 only when every window's vectors align. Cells outside the
// roi still influence their neighbors' windows, so they carry gradient.
// The sum of coh is floored at 1e-12: a fully canceling field yields a
// large-but-finite value (with zero gradient through the floored sum).
// Throws UnsupportedSpan unless span == 180, ShapeMismatch when roi and the
// distribution grid disagree, EmptyRoi when no roi cell is positive.
LossValue coherence_loss(const AngleDistribution& dist, const GrayImage& roi);

// Edge-suppression penalty on a segmentation score map:
//   value = (1/(W*H)) * sum |(seg * K)|,   K = [[0,1,0],[1,-4,1],[0,1,0]],
// with replicate padding (a constant map scores exactly 0). The subgradient
// of |.| at exact zeros is taken as 0. Throws KernelTooLarge when the map is
// smaller than 3x3.
LossValue smoothness_loss(const GrayImage& seg);

// Weight per component name.
using LossWeights = std::map<std::string, double>;

// The nine named component slots of the default training objective, all
// weighted 1.0. The names are placeholders for configuration, not tuned
// values: ori_ce, ori_ce_strong, ori_coherence, seg_ce, seg_smooth,
// mnt_score_ce, mnt_x_ce, mnt_y_ce, mnt_dir_ce.
LossWeights default_loss_weights();

// One named component of the total objective. `map` identifies which
// predicted map the gradient belongs to; components sharing a map have
// their gradients combined linearly.
struct LossTerm {
    std::string name;
    std::string map;
    LossValue loss;
};

// Weighted sum of component values; per-map weighted sums of gradients.
struct TotalLoss {
    double value = 0.0;
    std::map<std::string, std::vector<double>> gradients;
};

// Throws ConfigError when a component's name has no weight, ShapeMismatch
// when two components naming the same map carry different gradient sizes.
TotalLoss total_loss(const std::vector<LossTerm>& components, const LossWeights& weights);

} // namespace fp
