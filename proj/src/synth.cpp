#include "fp/synth.hpp"

#include <cmath>
#include <random>
#include <string>

namespace fp {

namespace {

// Deterministic Gaussian draws: raw mt19937_64 + Box-Muller, no
// vendor-dependent std distributions.
class NoiseGen {
public:
    explicit NoiseGen(uint64_t seed) : gen_(seed) {}
    double uniform() { return (gen_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double gaussian() {
        double u1 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * uniform());
    }

private:
    std::mt19937_64 gen_;
};

double wrap_pi(double a) {
    a = std::fmod(a + M_PI, 2.0 * M_PI);
    if (a < 0.0) a += 2.0 * M_PI;
    return a - M_PI;
}

double local_orientation(const SynthSpec& spec, double x, double y) {
    if (!spec.field) return spec.orientation_deg;
    const OrientationField& f = *spec.field;
    int cx = static_cast<int>(std::floor(x / f.stride));
    int cy = static_cast<int>(std::floor(y / f.stride));
    cx = std::min(std::max(cx, 0), f.angles.width - 1);
    cy = std::min(std::max(cy, 0), f.angles.height - 1);
    return f.angles.at(cx, cy);
}

// Phase without the spiral belonging to minutia `skip` (-1 keeps all).
double phase_without(const SynthSpec& spec, double x, double y, int skip) {
    const double beta = deg2rad(local_orientation(spec, x, y) + 90.0);
    double psi = (2.0 * M_PI / spec.period) * (x * std::cos(beta) + y * std::sin(beta)) +
                 spec.global_phase;
    for (size_t i = 0; i < spec.minutiae.size(); ++i) {
        if (static_cast<int>(i) == skip) continue;
        const PlantedMinutia& m = spec.minutiae[i];
        psi += m.polarity * std::atan2(y - m.y, x - m.x);
    }
    return psi;
}

double trace_direction(const SynthSpec& spec, int idx) {
    const PlantedMinutia& m = spec.minutiae[idx];
    return trace_spiral_ray(
        [&](double x, double y) { return phase_without(spec, x, y, idx); }, m.x, m.y,
        spec.period, m.polarity);
}

} // namespace

// The bright ridge terminating at a spiral satisfies
// carrier(probe) + s * gamma = 0 mod 2pi along the whole trace; near r = 0
// the spiral term pins gamma uniquely, and marching outward keeps us on the
// same branch as the ray bends into the surrounding ridge flow.
double trace_spiral_ray(const std::function<double(double, double)>& carrier, double cx,
                        double cy, double period, int polarity) {
    const double s = static_cast<double>(polarity);

    auto residual = [&](double r, double gamma) {
        const double px = cx + r * std::cos(gamma);
        const double py = cy + r * std::sin(gamma);
        return wrap_pi(carrier(px, py) + s * gamma);
    };

    double gamma = wrap_pi(-s * carrier(cx, cy));
    const int steps = 32;
    for (int k = 1; k <= steps; ++k) {
        const double r = period * k / steps;
        // Coarse scan around the previous angle, then bisect the bracketing
        // sign change. Robust against the near-fold geometry that Newton
        // handles badly.
        const double half_window = 0.6;
        const int samples = 49;
        double best_g = gamma, best_r = std::fabs(residual(r, gamma));
        double prev_g = gamma - half_window, prev_res = residual(r, prev_g);
        double lo = 0.0, hi = 0.0;
        bool bracketed = false;
        for (int i = 1; i < samples; ++i) {
            const double g = gamma - half_window + 2.0 * half_window * i / (samples - 1);
            const double res = residual(r, g);
            if (std::fabs(res) < best_r) {
                best_r = std::fabs(res);
                best_g = g;
            }
            if (!bracketed && std::fabs(res) < 2.0 && std::fabs(prev_res) < 2.0 &&
                ((res <= 0.0) != (prev_res <= 0.0))) {
                lo = prev_g;
                hi = g;
                bracketed = true;
            }
            prev_g = g;
            prev_res = res;
        }
        if (bracketed) {
            for (int it = 0; it < 40; ++it) {
                const double mid = 0.5 * (lo + hi);
                if ((residual(r, mid) <= 0.0) == (residual(r, lo) <= 0.0))
                    lo = mid;
                else
                    hi = mid;
            }
            gamma = 0.5 * (lo + hi);
        } else {
            gamma = best_g;
        }
    }
    return gamma;
}

double synth_phase(const SynthSpec& spec, double x, double y) {
    return phase_without(spec, x, y, -1);
}

SynthResult synth_print(const SynthSpec& spec, uint64_t seed) {
    if (spec.width < 1 || spec.height < 1) throw Error("synth_print: empty image");
    if (spec.period < 3.0) throw Error("synth_print: period must be >= 3 pixels");
    for (const PlantedMinutia& m : spec.minutiae) {
        if (m.polarity != 1 && m.polarity != -1)
            throw Error("synth_print: polarity must be +1 or -1");
        if (m.x < 0.0 || m.x >= spec.width || m.y < 0.0 || m.y >= spec.height)
            throw OutOfBounds("synth_print: minutia at (" + std::to_string(m.x) + ", " +
                              std::to_string(m.y) + ") outside the image");
    }

    SynthResult res;
    res.image = GrayImage(spec.width, spec.height);
    for (int y = 0; y < spec.height; ++y)
        for (int x = 0; x < spec.width; ++x)
            res.image.at(x, y) = spec.amplitude * std::cos(synth_phase(spec, x, y));

    if (spec.noise_sigma > 0.0) {
        NoiseGen noise(seed);
        for (auto& p : res.image.pixels) p += spec.noise_sigma * noise.gaussian();
    }

    for (size_t i = 0; i < spec.minutiae.size(); ++i) {
        const PlantedMinutia& m = spec.minutiae[i];
        double dir = rad2deg(trace_direction(spec, static_cast<int>(i)));
        dir = std::fmod(dir, 360.0);
        if (dir < 0.0) dir += 360.0;
        if (dir >= 360.0) dir = 0.0;
        res.ground_truth.push_back({m.x, m.y, dir, 1.0});
    }
    return res;
}

std::vector<LabeledPatch> synth_patch_dataset(int n, uint64_t seed) {
    if (n < 0) throw Error("synth_patch_dataset: n must be >= 0");
    const int side = 48;
    const int fg_count = (n + 1) / 2;
    std::vector<LabeledPatch> out;
    out.reserve(n);
    NoiseGen rng(seed);

    for (int k = 0; k < fg_count; ++k) {
        SynthSpec spec;
        spec.width = side;
        spec.height = side;
        spec.orientation_deg = rng.uniform(0.0, 180.0);
        spec.period = rng.uniform(6.0, 12.0);
        spec.global_phase = rng.uniform(0.0, 2.0 * M_PI);
        spec.amplitude = std::exp(rng.uniform(std::log(0.4), std::log(2.2)));
        spec.noise_sigma = rng.uniform(0.0, 0.25) * spec.amplitude;
        const uint64_t sub_seed = static_cast<uint64_t>(rng.uniform() * 9e15);
        LabeledPatch patch;
        patch.image = synth_print(spec, sub_seed).image;
        const double dc = rng.uniform(-0.5, 0.5);
        for (auto& p : patch.image.pixels) p += dc;
        patch.label = 1;
        out.push_back(std::move(patch));
    }
    for (int k = 0; k < n / 2; ++k) {
        LabeledPatch patch;
        patch.image = GrayImage(side, side);
        double level, sigma;
        if (k % 2 == 0) {
            level = rng.uniform(-0.8, 0.8);
            sigma = rng.uniform(0.005, 0.05);
        } else {
            level = rng.uniform(-0.3, 0.3);
            sigma = std::exp(rng.uniform(std::log(0.05), std::log(0.7)));
        }
        for (auto& p : patch.image.pixels) p = level + sigma * rng.gaussian();
        patch.label = 0;
        out.push_back(std::move(patch));
    }
    return out;
}

} // namespace fp
