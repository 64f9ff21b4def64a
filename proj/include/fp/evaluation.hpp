#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "fp/minutiae.hpp"

namespace fp {

// Gates for calling a predicted minutia correct: strictly closer than
// dist_thr pixels AND circular direction difference strictly under
// angle_thr degrees. Callers keep both positive.
struct MatchCriteria {
    double dist_thr = 15.0;
    double angle_thr = 30.0;
};

// One-to-one assignment between a predicted and a reference list.
// pairs holds (pred index, gt index). precision = |pairs|/|pred| and
// recall = |pairs|/|gt|, with 0/0 defined as 1 so empty-vs-empty
// comparisons do not poison batch averages. The error means are taken
// over matched pairs only (no pairs -> 0).
struct MatchResult {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    double precision = 1.0;
    double recall = 1.0;
    double mean_loc_err = 0.0;
    double mean_angle_err = 0.0;
};

// min(|a-b| mod 360, 360 - |a-b| mod 360), in degrees.
double circular_diff_deg(double a_deg, double b_deg);

// Candidate pairs are those passing both criteria gates; they are assigned
// greedily by ascending distance (ties by pred index, then gt index), each
// side used at most once. Deterministic.
MatchResult match_minutiae(const MinutiaeList& pred, const MinutiaeList& gt,
                           const MatchCriteria& c = {});

struct PrPoint {
    double threshold = 0.0;
    double precision = 1.0;
    double recall = 1.0;
};

// For each threshold (caller supplies them ascending), keep predictions with
// score >= threshold and run match_minutiae. Recall is non-increasing along
// an ascending threshold sweep.
std::vector<PrPoint> pr_curve(const MinutiaeList& pred, const MinutiaeList& gt,
                              const MatchCriteria& c, const std::vector<double>& thresholds);

// Re-computes (mean location error px, mean direction error deg) over the
// result's pairs from the original lists. Empty pair list -> (0, 0).
std::pair<double, double> error_stats(const MatchResult& result, const MinutiaeList& pred,
                                      const MinutiaeList& gt);

} // namespace fp
