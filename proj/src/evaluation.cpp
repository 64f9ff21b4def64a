#include "fp/evaluation.hpp"

#include <algorithm>
#include <cmath>

namespace fp {

double circular_diff_deg(double a_deg, double b_deg) {
    double d = std::fmod(std::fabs(a_deg - b_deg), 360.0);
    return d > 180.0 ? 360.0 - d : d;
}

MatchResult match_minutiae(const MinutiaeList& pred, const MinutiaeList& gt,
                           const MatchCriteria& c) {
    struct Cand {
        double d;
        std::size_t p, g;
    };
    std::vector<Cand> cands;
    for (std::size_t p = 0; p < pred.size(); ++p)
        for (std::size_t g = 0; g < gt.size(); ++g) {
            const double dx = pred[p].x - gt[g].x, dy = pred[p].y - gt[g].y;
            const double d = std::sqrt(dx * dx + dy * dy);
            if (d < c.dist_thr &&
                circular_diff_deg(pred[p].direction_deg, gt[g].direction_deg) < c.angle_thr)
                cands.push_back({d, p, g});
        }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.d != b.d) return a.d < b.d;
        if (a.p != b.p) return a.p < b.p;
        return a.g < b.g;
    });

    MatchResult res;
    std::vector<char> pused(pred.size(), 0), gused(gt.size(), 0);
    double loc = 0.0, ang = 0.0;
    for (const Cand& cd : cands) {
        if (pused[cd.p] || gused[cd.g]) continue;
        pused[cd.p] = gused[cd.g] = 1;
        res.pairs.emplace_back(cd.p, cd.g);
        loc += cd.d;
        ang += circular_diff_deg(pred[cd.p].direction_deg, gt[cd.g].direction_deg);
    }

    const double n = static_cast<double>(res.pairs.size());
    res.precision = pred.empty() ? 1.0 : n / static_cast<double>(pred.size());
    res.recall = gt.empty() ? 1.0 : n / static_cast<double>(gt.size());
    res.mean_loc_err = res.pairs.empty() ? 0.0 : loc / n;
    res.mean_angle_err = res.pairs.empty() ? 0.0 : ang / n;
    return res;
}

std::vector<PrPoint> pr_curve(const MinutiaeList& pred, const MinutiaeList& gt,
                              const MatchCriteria& c, const std::vector<double>& thresholds) {
    std::vector<PrPoint> out;
    out.reserve(thresholds.size());
    for (double t : thresholds) {
        MinutiaeList kept;
        for (const Minutia& m : pred)
            if (m.score >= t) kept.push_back(m);
        const MatchResult r = match_minutiae(kept, gt, c);
        out.push_back({t, r.precision, r.recall});
    }
    return out;
}

std::pair<double, double> error_stats(const MatchResult& result, const MinutiaeList& pred,
                                      const MinutiaeList& gt) {
    if (result.pairs.empty()) return {0.0, 0.0};
    double loc = 0.0, ang = 0.0;
    for (const auto& [p, g] : result.pairs) {
        const double dx = pred[p].x - gt[g].x, dy = pred[p].y - gt[g].y;
        loc += std::sqrt(dx * dx + dy * dy);
        ang += circular_diff_deg(pred[p].direction_deg, gt[g].direction_deg);
    }
    const double n = static_cast<double>(result.pairs.size());
    return {loc / n, ang / n};
}

} // namespace fp
