#include "fp/losses.hpp"

#include <algorithm>
#include <cmath>

#include "fp/errors.hpp"

namespace fp {

namespace {

int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

void check_roi(const GrayImage& roi, int width, int height, const char* who) {
    if (roi.width != width || roi.height != height)
        throw ShapeMismatch(std::string(who) + ": roi is " + std::to_string(roi.width) + "x" +
                            std::to_string(roi.height) + ", expected " + std::to_string(width) +
                            "x" + std::to_string(height));
    for (double v : roi.pixels)
        if (v > 0.0) return;
    throw EmptyRoi(std::string(who) + ": roi has no positive cells");
}

// Shared core: `bins` consecutive entries per cell, `width*height` cells.
LossValue balanced_ce_core(const std::vector<double>& pred, const std::vector<double>& label,
                           const GrayImage& roi, int width, int height, int bins,
                           double lambda_pos, double lambda_neg) {
    LossValue out;
    out.gradient.assign(pred.size(), 0.0);

    int cells = 0;
    double acc = 0.0;
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            if (!(roi.at(x, y) > 0.0)) continue;
            ++cells;
            const size_t base = (static_cast<size_t>(y) * width + x) * bins;
            for (int i = 0; i < bins; ++i) {
                const double l = label[base + i];
                const double raw = pred[base + i];
                const double p = std::min(1.0 - kProbClip, std::max(kProbClip, raw));
                acc += lambda_pos * l * std::log(p) + lambda_neg * (1.0 - l) * std::log1p(-p);
                if (raw >= kProbClip && raw <= 1.0 - kProbClip)
                    out.gradient[base + i] = lambda_pos * l / p - lambda_neg * (1.0 - l) / (1.0 - p);
            }
        }

    const double scale = -1.0 / cells;
    out.value = scale * acc;
    for (double& g : out.gradient) g *= scale;
    return out;
}

std::pair<double, double> balanced_lambdas_core(const std::vector<double>& label,
                                                const GrayImage& roi, int width, int height,
                                                int bins) {
    double pos = 0.0, neg = 0.0;
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            if (!(roi.at(x, y) > 0.0)) continue;
            const size_t base = (static_cast<size_t>(y) * width + x) * bins;
            for (int i = 0; i < bins; ++i) {
                pos += label[base + i];
                neg += 1.0 - label[base + i];
            }
        }
    return {1.0, neg > 0.0 ? pos / neg : 1.0};
}

} // namespace

LossValue balanced_cross_entropy(const AngleDistribution& pred, const AngleDistribution& label,
                                 const GrayImage& roi, double lambda_pos, double lambda_neg) {
    if (label.width != pred.width || label.height != pred.height || label.bins != pred.bins ||
        label.span != pred.span)
        throw ShapeMismatch("balanced_cross_entropy: pred and label distributions disagree");
    check_roi(roi, pred.width, pred.height, "balanced_cross_entropy");
    return balanced_ce_core(pred.probs, label.probs, roi, pred.width, pred.height, pred.bins,
                            lambda_pos, lambda_neg);
}

LossValue balanced_cross_entropy(const GrayImage& pred, const GrayImage& label,
                                 const GrayImage& roi, double lambda_pos, double lambda_neg) {
    if (label.width != pred.width || label.height != pred.height)
        throw ShapeMismatch("balanced_cross_entropy: pred and label rasters disagree");
    check_roi(roi, pred.width, pred.height, "balanced_cross_entropy");
    return balanced_ce_core(pred.pixels, label.pixels, roi, pred.width, pred.height, 1,
                            lambda_pos, lambda_neg);
}

std::pair<double, double> balanced_lambdas(const AngleDistribution& label, const GrayImage& roi) {
    check_roi(roi, label.width, label.height, "balanced_lambdas");
    return balanced_lambdas_core(label.probs, roi, label.width, label.height, label.bins);
}

std::pair<double, double> balanced_lambdas(const GrayImage& label, const GrayImage& roi) {
    check_roi(roi, label.width, label.height, "balanced_lambdas");
    return balanced_lambdas_core(label.pixels, roi, label.width, label.height, 1);
}

LossValue coherence_loss(const AngleDistribution& dist, const GrayImage& roi) {
    if (dist.span != 180)
        throw UnsupportedSpan("coherence_loss: span must be 180, got " +
                              std::to_string(dist.span));
    check_roi(roi, dist.width, dist.height, "coherence_loss");

    const int W = dist.width, H = dist.height, N = dist.bins;
    const int step = dist.span / N;

    std::vector<double> ucos(N), usin(N);
    for (int i = 0; i < N; ++i) {
        const double a = deg2rad(2.0 * step * i);
        ucos[i] = std::cos(a);
        usin[i] = std::sin(a);
    }

    // per-cell averaging vector and its magnitude
    std::vector<double> dx(static_cast<size_t>(W) * H, 0.0), dy(dx), mag(dx);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            double cx = 0.0, cy = 0.0;
            for (int i = 0; i < N; ++i) {
                const double p = dist.at(x, y, i);
                cx += p * ucos[i];
                cy += p * usin[i];
            }
            const size_t c = static_cast<size_t>(y) * W + x;
            dx[c] = cx / N;
            dy[c] = cy / N;
            mag[c] = std::hypot(dx[c], dy[c]);
        }

    // zero-padded 3x3 window sums and the ratio per window
    struct Win {
        double vx, vy, vlen, a;
    };
    std::vector<Win> win(static_cast<size_t>(W) * H);
    int cells = 0;
    double s = 0.0;
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            double vx = 0.0, vy = 0.0, a = 0.0;
            for (int j = -1; j <= 1; ++j)
                for (int i = -1; i <= 1; ++i) {
                    const int nx = x + i, ny = y + j;
                    if (nx < 0 || ny < 0 || nx >= W || ny >= H) continue;
                    const size_t c = static_cast<size_t>(ny) * W + nx;
                    vx += dx[c];
                    vy += dy[c];
                    a += mag[c];
                }
            const size_t w = static_cast<size_t>(y) * W + x;
            win[w] = {vx, vy, std::hypot(vx, vy), a};
            if (roi.at(x, y) > 0.0) {
                ++cells;
                s += win[w].vlen / (win[w].a + kCoherenceEps);
            }
        }

    LossValue out;
    out.gradient.assign(dist.probs.size(), 0.0);
    if (s <= 1e-12) {
        out.value = cells / 1e-12 - 1.0;
        return out; // floored denominator: locally constant
    }
    out.value = cells / s - 1.0;

    // d value / d coh(w) = -cells / s^2, then scatter through the windows
    const double dds = -cells / (s * s);
    std::vector<double> gx(dx.size(), 0.0), gy(dx.size(), 0.0);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            if (!(roi.at(x, y) > 0.0)) continue;
            const Win& ww = win[static_cast<size_t>(y) * W + x];
            const double denom = ww.a + kCoherenceEps;
            const double hx = ww.vlen > 1e-300 ? ww.vx / ww.vlen : 0.0;
            const double hy = ww.vlen > 1e-300 ? ww.vy / ww.vlen : 0.0;
            for (int j = -1; j <= 1; ++j)
                for (int i = -1; i <= 1; ++i) {
                    const int nx = x + i, ny = y + j;
                    if (nx < 0 || ny < 0 || nx >= W || ny >= H) continue;
                    const size_t c = static_cast<size_t>(ny) * W + nx;
                    const double ex = mag[c] > 1e-300 ? dx[c] / mag[c] : 0.0;
                    const double ey = mag[c] > 1e-300 ? dy[c] / mag[c] : 0.0;
                    // d coh / d d_c = V-hat/denom - |V| * d-hat / denom^2
                    gx[c] += dds * (hx / denom - ww.vlen * ex / (denom * denom));
                    gy[c] += dds * (hy / denom - ww.vlen * ey / (denom * denom));
                }
        }
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            const size_t c = static_cast<size_t>(y) * W + x;
            if (gx[c] == 0.0 && gy[c] == 0.0) continue;
            const size_t base = c * static_cast<size_t>(N);
            for (int i = 0; i < N; ++i)
                out.gradient[base + i] = (gx[c] * ucos[i] + gy[c] * usin[i]) / N;
        }
    return out;
}

LossValue smoothness_loss(const GrayImage& seg) {
    if (seg.width < 3 || seg.height < 3)
        throw KernelTooLarge("smoothness_loss: map must be at least 3x3, got " +
                             std::to_string(seg.width) + "x" + std::to_string(seg.height));
    Kernel lap(3, 3, 0.0);
    lap.tap(1, 0) = 1.0;
    lap.tap(0, 1) = 1.0;
    lap.tap(1, 1) = -4.0;
    lap.tap(2, 1) = 1.0;
    lap.tap(1, 2) = 1.0;
    const GrayImage resp = conv2d(seg, lap, PaddingMode::Replicate);

    const int W = seg.width, H = seg.height;
    const double inv = 1.0 / (static_cast<double>(W) * H);
    LossValue out;
    out.gradient.assign(seg.pixels.size(), 0.0);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            const double r = resp.at(x, y);
            out.value += inv * std::fabs(r);
            const double sgn = r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0);
            if (sgn == 0.0) continue;
            // adjoint of the replicate-padded convolution stencil
            for (int j = 0; j < 3; ++j)
                for (int i = 0; i < 3; ++i) {
                    const double t = lap.tap(i, j);
                    if (t == 0.0) continue;
                    const int sx = clampi(x - i + 1, 0, W - 1);
                    const int sy = clampi(y - j + 1, 0, H - 1);
                    out.gradient[static_cast<size_t>(sy) * W + sx] += inv * sgn * t;
                }
        }
    return out;
}

LossWeights default_loss_weights() {
    return {{"ori_ce", 1.0},       {"ori_ce_strong", 1.0}, {"ori_coherence", 1.0},
            {"seg_ce", 1.0},       {"seg_smooth", 1.0},    {"mnt_score_ce", 1.0},
            {"mnt_x_ce", 1.0},     {"mnt_y_ce", 1.0},      {"mnt_dir_ce", 1.0}};
}

TotalLoss total_loss(const std::vector<LossTerm>& components, const LossWeights& weights) {
    TotalLoss out;
    for (const LossTerm& term : components) {
        const auto it = weights.find(term.name);
        if (it == weights.end())
            throw ConfigError("total_loss: no weight for component '" + term.name + "'");
        const double w = it->second;
        out.value += w * term.loss.value;

        auto [slot, fresh] = out.gradients.try_emplace(
            term.map, std::vector<double>(term.loss.gradient.size(), 0.0));
        if (!fresh && slot->second.size() != term.loss.gradient.size())
            throw ShapeMismatch("total_loss: components for map '" + term.map +
                                "' carry different gradient sizes");
        for (size_t i = 0; i < term.loss.gradient.size(); ++i)
            slot->second[i] += w * term.loss.gradient[i];
    }
    return out;
}

} // namespace fp
