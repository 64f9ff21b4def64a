#include "fp/enhancement.hpp"

#include <cmath>
#include <string>

#include "fp/errors.hpp"

namespace fp {

namespace {

constexpr double kAmpFloor = 1e-9;

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

inline double into_half_open(double p) {
    if (p > M_PI) p -= 2.0 * M_PI;
    if (p <= -M_PI) p += 2.0 * M_PI;
    return p;
}

// One output sample of the horizontal complex pass. Both the full-image and
// the per-block paths funnel through this, so their results are identical
// down to the last bit.
inline void row_point(const GrayImage& in, const std::vector<double>& are,
                      const std::vector<double>& aim, int h, int x, int y, double& re,
                      double& im) {
    const int w = in.width;
    const double* irow = &in.pixels[static_cast<size_t>(y) * w];
    const int k = static_cast<int>(are.size());
    re = 0.0;
    im = 0.0;
    if (x - k + 1 + h >= 0 && x + h < w) {
        const double* p = irow + x + h;
        for (int i = 0; i < k; ++i) {
            re += are[i] * p[-i];
            im += aim[i] * p[-i];
        }
    } else {
        for (int i = 0; i < k; ++i) {
            const double s = irow[clampi(x - i + h, 0, w - 1)];
            re += are[i] * s;
            im += aim[i] * s;
        }
    }
}

// One output sample of the vertical complex pass over row-pass buffers that
// start at (bx0, by0) in image coordinates.
inline void col_point(const GrayImage& rre, const GrayImage& rim, const std::vector<double>& bre,
                      const std::vector<double>& bim, int h, int height, int x, int y, int bx0,
                      int by0, double& cre, double& cim) {
    const int k = static_cast<int>(bre.size());
    cre = 0.0;
    cim = 0.0;
    for (int j = 0; j < k; ++j) {
        const int sy = clampi(y - j + h, 0, height - 1);
        const double ar = rre.at(x - bx0, sy - by0);
        const double ai = rim.at(x - bx0, sy - by0);
        cre += bre[j] * ar - bim[j] * ai;
        cim += bre[j] * ai + bim[j] * ar;
    }
}

inline void response_to_phase_amp(double cre, double cim, double& phase, double& amp) {
    amp = std::sqrt(cre * cre + cim * cim);
    if (amp < kAmpFloor) {
        phase = 0.0;
    } else {
        phase = std::atan2(cim, cre);
        if (phase <= -M_PI) phase = M_PI;
    }
}

int nearest_bin(double theta, const std::vector<double>& thetas) {
    int best = 0;
    double best_d = 1e300;
    for (size_t i = 0; i < thetas.size(); ++i) {
        double d = std::fabs(theta - thetas[i]);
        d = std::fmod(d, 180.0);
        d = std::min(d, 180.0 - d);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(i);
        }
    }
    return best;
}

} // namespace

GaborBank gabor_bank(double freq, int n, double sigma, int ksize) {
    if (ksize < 1 || ksize % 2 == 0)
        throw InvalidKernel("gabor_bank: kernel size must be odd, got " + std::to_string(ksize));
    if (n < 2) throw Error("gabor_bank: need at least 2 orientations");
    if (180 / n < 1) throw Error("gabor_bank: more than 180 orientations");
    if (sigma <= 0.0 || freq <= 0.0) throw Error("gabor_bank: freq and sigma must be positive");

    GaborBank b;
    b.freq = freq;
    b.sigma = sigma;
    b.ksize = ksize;
    const int h = ksize / 2;
    const int step = 180 / n;
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    for (int i = 0; i < n; ++i) {
        const double theta = static_cast<double>(step * i);
        b.thetas.push_back(theta);
        const double beta = deg2rad(theta + 90.0);
        const double kx = 2.0 * M_PI * freq * std::cos(beta);
        const double ky = 2.0 * M_PI * freq * std::sin(beta);
        Kernel re, im;
        re.kw = re.kh = im.kw = im.kh = ksize;
        re.taps.resize(static_cast<size_t>(ksize) * ksize);
        im.taps.resize(re.taps.size());
        for (int j = 0; j < ksize; ++j)
            for (int ii = 0; ii < ksize; ++ii) {
                const double x = ii - h, y = j - h;
                const double env = std::exp(-(x * x + y * y) * inv2s2);
                const double ph = kx * x + ky * y;
                re.taps[static_cast<size_t>(j) * ksize + ii] = env * std::cos(ph);
                im.taps[static_cast<size_t>(j) * ksize + ii] = env * std::sin(ph);
            }
        b.real.push_back(std::move(re));
        b.imag.push_back(std::move(im));
    }
    return b;
}

GaborFactors gabor_factors(const GaborBank& bank, int channel) {
    if (channel < 0 || channel >= bank.size())
        throw OutOfBounds("gabor_factors: channel " + std::to_string(channel));
    const int ksize = bank.ksize;
    const int h = ksize / 2;
    const double beta = deg2rad(bank.thetas[channel] + 90.0);
    const double kx = 2.0 * M_PI * bank.freq * std::cos(beta);
    const double ky = 2.0 * M_PI * bank.freq * std::sin(beta);
    const double inv2s2 = 1.0 / (2.0 * bank.sigma * bank.sigma);
    GaborFactors f;
    f.row_re.resize(ksize);
    f.row_im.resize(ksize);
    f.col_re.resize(ksize);
    f.col_im.resize(ksize);
    for (int i = 0; i < ksize; ++i) {
        const double t = i - h;
        const double env = std::exp(-t * t * inv2s2);
        f.row_re[i] = env * std::cos(kx * t);
        f.row_im[i] = env * std::sin(kx * t);
        f.col_re[i] = env * std::cos(ky * t);
        f.col_im[i] = env * std::sin(ky * t);
    }
    return f;
}

GroupedPhases grouped_phases(const GrayImage& image, const GaborBank& bank,
                             std::vector<GrayImage>* amplitudes) {
    if (bank.ksize > image.width || bank.ksize > image.height)
        throw KernelTooLarge("grouped_phases: bank kernel exceeds image");
    const int w = image.width, h = image.height, n = bank.size();
    const int half = bank.ksize / 2;

    GroupedPhases gp;
    gp.width = w;
    gp.height = h;
    gp.channels = n;
    gp.phases.assign(static_cast<size_t>(w) * h * n, 0.0);
    if (amplitudes) amplitudes->assign(n, GrayImage(w, h));

    GrayImage rre(w, h), rim(w, h);
    for (int c = 0; c < n; ++c) {
        const GaborFactors f = gabor_factors(bank, c);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                row_point(image, f.row_re, f.row_im, half, x, y, rre.at(x, y), rim.at(x, y));
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                double cre, cim, phase, amp;
                col_point(rre, rim, f.col_re, f.col_im, half, h, x, y, 0, 0, cre, cim);
                response_to_phase_amp(cre, cim, phase, amp);
                gp.at(x, y, c) = phase;
                if (amplitudes) (*amplitudes)[c].at(x, y) = amp;
            }
    }
    return gp;
}

OrientationMask orientation_mask(const OrientationField& field, const GaborBank& bank, int width,
                                 int height) {
    const int cw = field.angles.width, ch = field.angles.height;
    const int w = width < 0 ? cw * field.stride : width;
    const int h = height < 0 ? ch * field.stride : height;
    const int n = bank.size();

    // quantize per cell, then replicate over the cell's pixels
    std::vector<int> bins(static_cast<size_t>(cw) * ch);
    for (int cy = 0; cy < ch; ++cy)
        for (int cx = 0; cx < cw; ++cx) {
            const double a = field.angles.at(cx, cy);
            if (a < 0.0 || a >= 180.0)
                throw AngleOutOfRange("orientation_mask: angle outside [0, 180)");
            bins[static_cast<size_t>(cy) * cw + cx] = nearest_bin(a, bank.thetas);
        }

    OrientationMask m;
    m.width = w;
    m.height = h;
    m.channels = n;
    m.mask.assign(static_cast<size_t>(w) * h * n, 0.0);
    for (int y = 0; y < h; ++y) {
        const int cy = clampi(y / field.stride, 0, ch - 1);
        for (int x = 0; x < w; ++x) {
            const int cx = clampi(x / field.stride, 0, cw - 1);
            m.at(x, y, bins[static_cast<size_t>(cy) * cw + cx]) = 1.0;
        }
    }
    return m;
}

OrientationMask soft_orientation_mask(const AngleDistribution& dist, const GaborBank& bank) {
    if (dist.bins != bank.size())
        throw ShapeMismatch("soft_orientation_mask: distribution bins != bank size");
    if (dist.span != 180) throw UnsupportedSpan("soft_orientation_mask: span must be 180");
    OrientationMask m;
    m.width = dist.width;
    m.height = dist.height;
    m.channels = dist.bins;
    m.mask = dist.probs;
    return m;
}

static EnhancedMap enhance_impl(const GroupedPhases& phases, const OrientationMask& mask,
                                const std::vector<GrayImage>* amplitudes) {
    if (phases.width != mask.width || phases.height != mask.height ||
        phases.channels != mask.channels)
        throw ShapeMismatch("enhance: phases and mask dimensions differ");
    if (amplitudes && static_cast<int>(amplitudes->size()) != phases.channels)
        throw ShapeMismatch("enhance: amplitude channel count differs");

    EnhancedMap out;
    out.phase = GrayImage(phases.width, phases.height);
    if (amplitudes) out.amplitude = GrayImage(phases.width, phases.height);
    for (int y = 0; y < phases.height; ++y)
        for (int x = 0; x < phases.width; ++x) {
            double e = 0.0, a = 0.0;
            for (int c = 0; c < phases.channels; ++c) {
                const double m = mask.at(x, y, c);
                if (m == 0.0) continue;
                e += phases.at(x, y, c) * m;
                if (amplitudes) a += (*amplitudes)[c].at(x, y) * m;
            }
            out.phase.at(x, y) = into_half_open(e);
            if (amplitudes) out.amplitude.at(x, y) = a;
        }
    return out;
}

EnhancedMap enhance(const GroupedPhases& phases, const OrientationMask& mask) {
    return enhance_impl(phases, mask, nullptr);
}

EnhancedMap enhance(const GroupedPhases& phases, const OrientationMask& mask,
                    const std::vector<GrayImage>& amplitudes) {
    for (const GrayImage& a : amplitudes)
        if (a.width != phases.width || a.height != phases.height)
            throw ShapeMismatch("enhance: amplitude raster dimensions differ");
    return enhance_impl(phases, mask, &amplitudes);
}

EnhancedMap enhance_with_field(const GrayImage& image, const OrientationField& field,
                               const GaborBank& bank) {
    if (bank.ksize > image.width || bank.ksize > image.height)
        throw KernelTooLarge("enhance_with_field: bank kernel exceeds image");
    const int w = image.width, h = image.height;
    const int stride = field.stride;
    const int cw = field.angles.width, ch = field.angles.height;
    if ((w + stride - 1) / stride != cw || (h + stride - 1) / stride != ch)
        throw ShapeMismatch("enhance_with_field: field does not cover the image");
    const int half = bank.ksize / 2;

    EnhancedMap out;
    out.phase = GrayImage(w, h);
    out.amplitude = GrayImage(w, h);

    std::vector<GaborFactors> factors(bank.size());
    std::vector<char> have(bank.size(), 0);

    GrayImage rre, rim;
    for (int cy = 0; cy < ch; ++cy)
        for (int cx = 0; cx < cw; ++cx) {
            const double a = field.angles.at(cx, cy);
            if (a < 0.0 || a >= 180.0)
                throw AngleOutOfRange("enhance_with_field: angle outside [0, 180)");
            const int bin = nearest_bin(a, bank.thetas);
            if (!have[bin]) {
                factors[bin] = gabor_factors(bank, bin);
                have[bin] = 1;
            }
            const GaborFactors& f = factors[bin];

            const int x0 = cx * stride, x1 = std::min((cx + 1) * stride, w) - 1;
            const int y0 = cy * stride, y1 = std::min((cy + 1) * stride, h) - 1;
            const int by0 = std::max(y0 - half, 0), by1 = std::min(y1 + half, h - 1);
            const int bw = x1 - x0 + 1, bh = by1 - by0 + 1;
            if (rre.width < bw || rre.height < bh) {
                rre = GrayImage(std::max(bw, rre.width), std::max(bh, rre.height));
                rim = GrayImage(rre.width, rre.height);
            }
            for (int y = by0; y <= by1; ++y)
                for (int x = x0; x <= x1; ++x)
                    row_point(image, f.row_re, f.row_im, half, x, y, rre.at(x - x0, y - by0),
                              rim.at(x - x0, y - by0));
            for (int y = y0; y <= y1; ++y)
                for (int x = x0; x <= x1; ++x) {
                    double cre, cim;
                    col_point(rre, rim, f.col_re, f.col_im, half, h, x, y, x0, by0, cre, cim);
                    response_to_phase_amp(cre, cim, out.phase.at(x, y), out.amplitude.at(x, y));
                }
        }
    return out;
}

GrayImage enhanced_cosine(const EnhancedMap& map) {
    GrayImage out(map.phase.width, map.phase.height);
    for (size_t i = 0; i < out.size(); ++i) out.pixels[i] = std::cos(map.phase.pixels[i]);
    return out;
}

} // namespace fp
