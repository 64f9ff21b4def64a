#include "fp/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fp/synth.hpp"

namespace fp {

namespace {

constexpr double kDenomFloor = 1e-9;

int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

double wrap_to_pi(double a) {
    a = std::fmod(a + M_PI, 2.0 * M_PI);
    if (a < 0.0) a += 2.0 * M_PI;
    return a - M_PI;
}

// Wrap-safe bilinear phase lookup: interpolates the unit phasor.
double sample_phase(const GrayImage& phase, double x, double y) {
    const int x0 = clampi(static_cast<int>(std::floor(x)), 0, phase.width - 1);
    const int y0 = clampi(static_cast<int>(std::floor(y)), 0, phase.height - 1);
    const int x1 = std::min(x0 + 1, phase.width - 1);
    const int y1 = std::min(y0 + 1, phase.height - 1);
    const double fx = std::min(std::max(x - x0, 0.0), 1.0);
    const double fy = std::min(std::max(y - y0, 0.0), 1.0);
    double re = 0.0, im = 0.0;
    const double wts[4] = {(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy, fx * fy};
    const double vals[4] = {phase.at(x0, y0), phase.at(x1, y0), phase.at(x0, y1),
                            phase.at(x1, y1)};
    for (int i = 0; i < 4; ++i) {
        re += wts[i] * std::cos(vals[i]);
        im += wts[i] * std::sin(vals[i]);
    }
    return std::atan2(im, re);
}

Kernel raw_ending_template(double alpha_deg, int ksize, double period) {
    const int h = ksize / 2;
    const double a = deg2rad(alpha_deg);
    const double beta = a + M_PI / 2.0;
    const double wave = 2.0 * M_PI / period;
    const double sigma = period / 2.0;
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    Kernel t(ksize, ksize);
    for (int j = 0; j < ksize; ++j)
        for (int i = 0; i < ksize; ++i) {
            const double dx = i - h;
            const double dy = j - h;
            if (dx == 0.0 && dy == 0.0) continue; // winding center: leave 0
            const double env = std::exp(-(dx * dx + dy * dy) * inv2s2);
            const double psi = wave * (dx * std::cos(beta) + dy * std::sin(beta)) +
                               std::atan2(dy, dx) - a;
            t.taps[static_cast<size_t>(j) * ksize + i] = env * std::cos(psi);
        }
    double mean = 0.0;
    for (double v : t.taps) mean += v;
    mean /= static_cast<double>(t.taps.size());
    double norm2 = 0.0;
    for (double& v : t.taps) {
        v -= mean;
        norm2 += v * v;
    }
    if (norm2 <= 0.0)
        throw InvalidKernel("template_bank: degenerate template at " + std::to_string(alpha_deg));
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& v : t.taps) v *= inv;
    return t;
}

// How each template's response derives from the independent correlations:
// templates that are exact negations (or copies) of an earlier one reuse its
// dot product with a sign.
struct BankPlan {
    int ksize = 0;
    std::vector<const double*> indep; // distinct tap arrays
    std::vector<int> slot;            // template -> index into indep
    std::vector<double> sign;         // template -> +1 or -1
};

BankPlan plan_bank(const TemplateBank& bank) {
    if (bank.templates.empty()) throw InvalidKernel("minutiae_score: empty template bank");
    BankPlan plan;
    plan.ksize = bank.templates[0].kw;
    if (plan.ksize < 3 || plan.ksize % 2 == 0)
        throw InvalidKernel("minutiae_score: template size must be odd and >= 3");
    const size_t taps = bank.templates[0].taps.size();
    for (const Kernel& t : bank.templates)
        if (t.kw != plan.ksize || t.kh != plan.ksize || t.taps.size() != taps)
            throw InvalidKernel("minutiae_score: templates must share one odd square size");

    const int n = bank.size();
    plan.slot.resize(n);
    plan.sign.resize(n);
    for (int t = 0; t < n; ++t) {
        int found = -1;
        double s = 1.0;
        for (int p = 0; p < t && found < 0; ++p) {
            bool same = true, neg = true;
            for (size_t i = 0; i < taps && (same || neg); ++i) {
                const double av = bank.templates[t].taps[i];
                const double bv = bank.templates[p].taps[i];
                if (av != bv) same = false;
                if (av != -bv) neg = false;
            }
            if (same) {
                found = plan.slot[p];
                s = plan.sign[p];
            } else if (neg) {
                found = plan.slot[p];
                s = -plan.sign[p];
            }
        }
        if (found < 0) {
            plan.slot[t] = static_cast<int>(plan.indep.size());
            plan.sign[t] = 1.0;
            plan.indep.push_back(bank.templates[t].taps.data());
        } else {
            plan.slot[t] = found;
            plan.sign[t] = s;
        }
    }
    return plan;
}

} // namespace

TemplateBank template_bank(int k, int ksize, double period) {
    if (k < 4) throw InvalidKernel("template_bank: need at least 4 directions");
    if (ksize < 3 || ksize % 2 == 0)
        throw InvalidKernel("template_bank: ksize must be odd and >= 3");
    if (!(period > 0.0)) throw InvalidKernel("template_bank: period must be positive");

    TemplateBank bank;
    bank.period = period;
    const double step = 360.0 / k;
    bank.templates.reserve(k);
    bank.directions.reserve(k);
    for (int t = 0; t < k; ++t) {
        bank.directions.push_back(step * t);
        bank.templates.push_back(raw_ending_template(step * t, ksize, period));
    }
    return bank;
}

ScoreMap minutiae_score(const GrayImage& ridge, const TemplateBank& bank, const GrayImage& seg) {
    if (!ridge.same_shape(seg)) throw ShapeMismatch("minutiae_score: ridge and seg sizes differ");
    const BankPlan plan = plan_bank(bank);
    const int k = plan.ksize;
    if (k > ridge.width || k > ridge.height)
        throw KernelTooLarge("minutiae_score: templates exceed the image");

    const int w = ridge.width, hgt = ridge.height, h = k / 2;
    const double n = static_cast<double>(k) * k;

    GrayImage sq(w, hgt);
    for (size_t i = 0; i < ridge.size(); ++i) sq.pixels[i] = ridge.pixels[i] * ridge.pixels[i];
    const GrayImage s1 = box_sum(ridge, k);
    const GrayImage s2 = box_sum(sq, k);

    ScoreMap out{GrayImage(w, hgt, 0.0), GrayImage(w, hgt, 0.0)};
    const int nslots = static_cast<int>(plan.indep.size());
    std::vector<double> dots(nslots);
    std::vector<double> rowbuf(k);
    const double* in = ridge.pixels.data();

    for (int y = 0; y < hgt; ++y)
        for (int x = 0; x < w; ++x) {
            if (seg.at(x, y) == 0.0) continue;
            const double d2 = s2.at(x, y) - s1.at(x, y) * s1.at(x, y) / n;
            const double denom = d2 > 0.0 ? std::sqrt(d2) : 0.0;
            if (denom <= kDenomFloor) continue;

            std::fill(dots.begin(), dots.end(), 0.0);
            const bool xin = x >= h && x + h < w;
            for (int j = 0; j < k; ++j) {
                const int ry = clampi(y + j - h, 0, hgt - 1);
                const double* q;
                if (xin) {
                    q = in + static_cast<size_t>(ry) * w + (x - h);
                } else {
                    for (int i = 0; i < k; ++i)
                        rowbuf[i] = in[static_cast<size_t>(ry) * w + clampi(x - h + i, 0, w - 1)];
                    q = rowbuf.data();
                }
                for (int s = 0; s < nslots; ++s) {
                    const double* trow = plan.indep[s] + static_cast<size_t>(j) * k;
                    double acc = 0.0;
                    for (int i = 0; i < k; ++i) acc += trow[i] * q[i];
                    dots[s] += acc;
                }
            }

            // each template is tried against the image and its negation
            // (inverted-contrast ending, same terminating axis, same tag)
            double best = -2.0;
            double bestdir = 0.0;
            for (int t = 0; t < bank.size(); ++t) {
                const double ncc = plan.sign[t] * dots[plan.slot[t]] / denom;
                const double resp = std::abs(ncc);
                if (resp > best) {
                    best = resp;
                    bestdir = bank.directions[t];
                }
            }
            out.score.at(x, y) = std::min(1.0, std::max(0.0, best));
            out.direction.at(x, y) = bestdir;
        }
    return out;
}

ScoreMap minutiae_score(const EnhancedMap& e, const TemplateBank& bank, const GrayImage& seg) {
    return minutiae_score(enhanced_cosine(e), bank, seg);
}

MinutiaeList score_peaks(const ScoreMap& sm, double threshold) {
    if (!sm.score.same_shape(sm.direction))
        throw ShapeMismatch("score_peaks: score and direction sizes differ");
    MinutiaeList out;
    const int w = sm.score.width, h = sm.score.height;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double s = sm.score.at(x, y);
            if (!(s > threshold)) continue;
            bool wins = true;
            for (int dy = -1; dy <= 1 && wins; ++dy)
                for (int dx = -1; dx <= 1 && wins; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const int nx = x + dx, ny = y + dy;
                    if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                    const double q = sm.score.at(nx, ny);
                    if (q > s || (q == s && (nx < x || (nx == x && ny < y)))) wins = false;
                }
            if (wins)
                out.push_back(Minutia{static_cast<double>(x), static_cast<double>(y),
                                      sm.direction.at(x, y), s});
        }
    return out;
}

MinutiaeList nms(MinutiaeList list, double radius) {
    std::sort(list.begin(), list.end(), [](const Minutia& a, const Minutia& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.x != b.x) return a.x < b.x;
        if (a.y != b.y) return a.y < b.y;
        return a.direction_deg < b.direction_deg;
    });
    MinutiaeList kept;
    const double r2 = radius * radius;
    for (const Minutia& m : list) {
        bool ok = true;
        for (const Minutia& q : kept) {
            const double dx = m.x - q.x, dy = m.y - q.y;
            if (radius >= 0.0 && dx * dx + dy * dy <= r2) {
                ok = false;
                break;
            }
        }
        if (ok) kept.push_back(m);
    }
    return kept;
}

double refine_minutia_direction(const EnhancedMap& e, double x, double y, double period,
                                double fallback_deg) {
    const GrayImage& E = e.phase;
    if (E.width < 3 || E.height < 3 || !(period > 0.0)) return fallback_deg;

    // winding sign from the phase circulation on a small ring
    const int nring = 16;
    const double rring = 3.0;
    double wind = 0.0;
    double prev = sample_phase(E, x + rring, y);
    for (int i = 1; i <= nring; ++i) {
        const double a = 2.0 * M_PI * i / nring;
        const double cur = sample_phase(E, x + rring * std::cos(a), y + rring * std::sin(a));
        wind += wrap_to_pi(cur - prev);
        prev = cur;
    }
    wind /= 2.0 * M_PI;
    int s = 0;
    if (wind > 0.5)
        s = 1;
    else if (wind < -0.5)
        s = -1;
    else
        return fallback_deg;

    // carrier wave normal from wrapped phase gradients over an annulus
    // (the spiral's own gradient averages out by symmetry)
    const double rmax = period;
    double gx = 0.0, gy = 0.0;
    double zr = 0.0, zi = 0.0;
    const double k = 2.0 * M_PI / period;
    const int x_lo = std::max(1, static_cast<int>(std::ceil(x - rmax)));
    const int x_hi = std::min(E.width - 2, static_cast<int>(std::floor(x + rmax)));
    const int y_lo = std::max(1, static_cast<int>(std::ceil(y - rmax)));
    const int y_hi = std::min(E.height - 2, static_cast<int>(std::floor(y + rmax)));
    for (int qy = y_lo; qy <= y_hi; ++qy)
        for (int qx = x_lo; qx <= x_hi; ++qx) {
            const double dx = qx - x, dy = qy - y;
            const double r2 = dx * dx + dy * dy;
            if (r2 < 9.0 || r2 > rmax * rmax) continue;
            gx += wrap_to_pi(E.at(qx + 1, qy) - E.at(qx - 1, qy)) * 0.5;
            gy += wrap_to_pi(E.at(qx, qy + 1) - E.at(qx, qy - 1)) * 0.5;
        }
    if (std::hypot(gx, gy) < 1e-9) return fallback_deg;
    const double beta = std::atan2(gy, gx);

    // carrier phase at the center: circular mean of the de-trended phase
    for (int qy = y_lo; qy <= y_hi; ++qy)
        for (int qx = x_lo; qx <= x_hi; ++qx) {
            const double dx = qx - x, dy = qy - y;
            const double r2 = dx * dx + dy * dy;
            if (r2 < 9.0 || r2 > rmax * rmax) continue;
            const double resid = E.at(qx, qy) - k * (dx * std::cos(beta) + dy * std::sin(beta)) -
                                 s * std::atan2(dy, dx);
            zr += std::cos(resid);
            zi += std::sin(resid);
        }
    if (std::hypot(zr, zi) < 1e-9) return fallback_deg;
    const double delta = std::atan2(zi, zr);

    const double gamma = trace_spiral_ray(
        [&](double px, double py) {
            return k * ((px - x) * std::cos(beta) + (py - y) * std::sin(beta)) + delta;
        },
        x, y, period, s);
    double deg = std::fmod(rad2deg(gamma), 360.0);
    if (deg < 0.0) deg += 360.0;
    return deg;
}

MinutiaeList extract(const EnhancedMap& e, const TemplateBank& bank, const GrayImage& seg,
                     double threshold, double nms_radius) {
    return nms(score_peaks(minutiae_score(e, bank, seg), threshold), nms_radius);
}

MinutiaeMaps encode_minutiae_maps(const MinutiaeList& list, int width, int height,
                                  const AngleCoding& dir_coding, int* collisions) {
    if (width < 1 || height < 1)
        throw InvalidFactor("encode_minutiae_maps: image size must be positive");
    if (dir_coding.span != 360)
        throw UnsupportedSpan("encode_minutiae_maps: direction span must be 360");
    const int cw = (width + kMinutiaeCellSize - 1) / kMinutiaeCellSize;
    const int ch = (height + kMinutiaeCellSize - 1) / kMinutiaeCellSize;

    MinutiaeMaps maps;
    maps.score = GrayImage(cw, ch, 0.0);
    maps.xoff = OffsetDistribution{cw, ch, kMinutiaeCellSize, {}};
    maps.xoff.probs.assign(static_cast<size_t>(cw) * ch * kMinutiaeCellSize,
                           1.0 / kMinutiaeCellSize);
    maps.yoff = maps.xoff;
    maps.direction.width = cw;
    maps.direction.height = ch;
    maps.direction.bins = dir_coding.bins;
    maps.direction.span = dir_coding.span;
    maps.direction.probs.assign(static_cast<size_t>(cw) * ch * dir_coding.bins,
                                1.0 / dir_coding.bins);

    std::vector<char> occupied(static_cast<size_t>(cw) * ch, 0);
    for (const Minutia& m : list) {
        if (!(m.x >= 0.0 && m.x < width && m.y >= 0.0 && m.y < height))
            throw OutOfBounds("encode_minutiae_maps: minutia outside the image");
        const int xi = std::min(static_cast<int>(std::lround(m.x)), width - 1);
        const int yi = std::min(static_cast<int>(std::lround(m.y)), height - 1);
        const int cx = xi / kMinutiaeCellSize, cy = yi / kMinutiaeCellSize;
        char& used = occupied[static_cast<size_t>(cy) * cw + cx];
        if (used && collisions) ++*collisions;
        used = 1;

        maps.score.at(cx, cy) = 1.0;
        for (int b = 0; b < kMinutiaeCellSize; ++b) {
            maps.xoff.at(cx, cy, b) = b == xi % kMinutiaeCellSize ? 1.0 : 0.0;
            maps.yoff.at(cx, cy, b) = b == yi % kMinutiaeCellSize ? 1.0 : 0.0;
        }
        const std::vector<double> enc = encode_angle(m.direction_deg, dir_coding);
        for (int b = 0; b < dir_coding.bins; ++b) maps.direction.at(cx, cy, b) = enc[b];
    }
    return maps;
}

MinutiaeList decode_minutiae_maps(const MinutiaeMaps& maps, double threshold, double nms_radius) {
    const int cw = maps.score.width, ch = maps.score.height;
    if (maps.xoff.width != cw || maps.xoff.height != ch || maps.yoff.width != cw ||
        maps.yoff.height != ch || maps.direction.width != cw || maps.direction.height != ch ||
        maps.xoff.bins != kMinutiaeCellSize || maps.yoff.bins != kMinutiaeCellSize)
        throw ShapeMismatch("decode_minutiae_maps: map sizes disagree");

    const GrayImage dirs = decode_theta_max(maps.direction);
    MinutiaeList out;
    for (int cy = 0; cy < ch; ++cy)
        for (int cx = 0; cx < cw; ++cx) {
            const double s = maps.score.at(cx, cy);
            if (!(s > threshold)) continue;
            int bx = 0, by = 0;
            for (int b = 1; b < kMinutiaeCellSize; ++b) {
                if (maps.xoff.at(cx, cy, b) > maps.xoff.at(cx, cy, bx)) bx = b;
                if (maps.yoff.at(cx, cy, b) > maps.yoff.at(cx, cy, by)) by = b;
            }
            out.push_back(Minutia{static_cast<double>(cx * kMinutiaeCellSize + bx),
                                  static_cast<double>(cy * kMinutiaeCellSize + by),
                                  dirs.at(cx, cy), s});
        }
    return nms(std::move(out), nms_radius);
}

} // namespace fp
