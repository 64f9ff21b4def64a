#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "fp/enhancement.hpp"
#include "fp/synth.hpp"
#include "oracles.hpp"

using fp::GrayImage;

namespace {

double wrap_pi(double a) {
    a = std::fmod(a + M_PI, 2.0 * M_PI);
    if (a < 0.0) a += 2.0 * M_PI;
    return a - M_PI;
}

GrayImage sinusoid(int w, int h, double theta_deg, double period, double phase0 = 0.0) {
    fp::SynthSpec spec;
    spec.width = w;
    spec.height = h;
    spec.orientation_deg = theta_deg;
    spec.period = period;
    spec.global_phase = phase0;
    return fp::synth_print(spec, 0).image;
}

// complex response of one channel via two plain 2D convolutions
void direct_response(const GrayImage& img, const fp::GaborBank& bank, int c, GrayImage& re,
                     GrayImage& im) {
    re = fp::conv2d(img, bank.real[c], fp::PaddingMode::Replicate);
    im = fp::conv2d(img, bank.imag[c], fp::PaddingMode::Replicate);
}

} // namespace

TEST_CASE("gabor_bank: orientations, oscillation axis, validation") {
    fp::GaborBank b = fp::gabor_bank(1.0 / 9.0, 2, 4.5, 25);
    REQUIRE(b.size() == 2);
    CHECK(b.thetas[0] == 0.0);
    CHECK(b.thetas[1] == 90.0);
    CHECK(b.freq > 0.0);

    // theta=0 kernel: wave runs along y, so the center column changes sign
    // while the center row keeps one sign under its envelope
    const int h = 12;
    const fp::Kernel& re = b.real[0];
    bool row_flips = false, col_flips = false;
    for (int i = 1; i < 25; ++i) {
        if (re.taps[h * 25 + i] * re.taps[h * 25 + i - 1] < 0.0) row_flips = true;
        if (re.taps[i * 25 + h] * re.taps[(i - 1) * 25 + h] < 0.0) col_flips = true;
    }
    CHECK(!row_flips);
    CHECK(col_flips);

    for (int i = 1; i < b.size(); ++i) CHECK(b.thetas[i] > b.thetas[i - 1]);

    CHECK_THROWS_AS(fp::gabor_bank(1.0 / 9.0, 2, 4.5, 24), fp::InvalidKernel);
    CHECK_THROWS_AS(fp::gabor_bank(1.0 / 9.0, 1, 4.5, 25), fp::Error);
    CHECK_THROWS_AS(fp::gabor_bank(1.0 / 9.0, 2, 0.0, 25), fp::Error);
    CHECK_THROWS_AS(fp::gabor_bank(0.0, 2, 4.5, 25), fp::Error);
}

TEST_CASE("gabor_bank: real parts even, imaginary parts odd under point reflection") {
    fp::GaborBank b = fp::gabor_bank(0.13, 5, 3.0, 11);
    for (int c = 0; c < 5; ++c)
        for (int j = 0; j < 11; ++j)
            for (int i = 0; i < 11; ++i) {
                CHECK(b.real[c].taps[j * 11 + i] == b.real[c].taps[(10 - j) * 11 + (10 - i)]);
                CHECK(b.imag[c].taps[j * 11 + i] == -b.imag[c].taps[(10 - j) * 11 + (10 - i)]);
            }
}

TEST_CASE("gabor_bank: matched response dominates the perpendicular one") {
    fp::GaborBank b = fp::gabor_bank(1.0 / 9.0, 2, 4.5, 25);
    GrayImage matched = sinusoid(64, 64, 0.0, 9.0);
    GrayImage perp = sinusoid(64, 64, 90.0, 9.0);
    GrayImage re, im;
    direct_response(matched, b, 0, re, im);
    const double amp_m = std::hypot(re.at(32, 32), im.at(32, 32));
    direct_response(perp, b, 0, re, im);
    const double amp_p = std::hypot(re.at(32, 32), im.at(32, 32));
    CHECK(amp_m >= 5.0 * amp_p);
    CHECK(amp_m > 1.0);
}

TEST_CASE("grouped_phases: zero image gives zero phases and amplitudes") {
    GrayImage zero(40, 40, 0.0);
    fp::GaborBank b = fp::gabor_bank(1.0 / 9.0, 4, 4.5, 25);
    std::vector<GrayImage> amps;
    fp::GroupedPhases gp = fp::grouped_phases(zero, b, &amps);
    for (double p : gp.phases) CHECK(p == 0.0);
    for (const auto& a : amps)
        for (double v : a.pixels) CHECK(v == 0.0);
}

TEST_CASE("grouped_phases: matched channel recovers the sinusoid's local phase") {
    const double T = 9.0, phi0 = 0.7;
    GrayImage img = sinusoid(64, 64, 0.0, T, phi0);
    fp::GaborBank b = fp::gabor_bank(1.0 / T, 2, 4.5, 25);
    fp::GroupedPhases gp = fp::grouped_phases(img, b);
    const double beta = fp::deg2rad(90.0);
    for (int y = 13; y < 51; ++y)
        for (int x = 13; x < 51; ++x) {
            const double psi =
                (2.0 * M_PI / T) * (x * std::cos(beta) + y * std::sin(beta)) + phi0;
            CHECK(std::fabs(wrap_pi(gp.at(x, y, 0) - psi)) <= 0.05);
        }
}

TEST_CASE("grouped_phases: equals two real convolutions per channel") {
    oracle::Rng rng(71);
    GrayImage img = oracle::random_image(40, 36, rng);
    fp::GaborBank b = fp::gabor_bank(0.15, 3, 2.0, 9);
    std::vector<GrayImage> amps;
    fp::GroupedPhases gp = fp::grouped_phases(img, b, &amps);
    for (int c = 0; c < 3; ++c) {
        GrayImage re, im;
        direct_response(img, b, c, re, im);
        for (int y = 0; y < 36; ++y)
            for (int x = 0; x < 40; ++x) {
                const double amp = std::sqrt(re.at(x, y) * re.at(x, y) + im.at(x, y) * im.at(x, y));
                double phase = amp < 1e-9 ? 0.0 : std::atan2(im.at(x, y), re.at(x, y));
                if (phase <= -M_PI) phase = M_PI;
                CHECK(std::fabs(amps[c].at(x, y) - amp) <= 1e-12);
                CHECK(std::fabs(gp.at(x, y, c) - phase) <= 1e-12);
            }
    }
    for (double p : gp.phases) {
        CHECK(p > -M_PI);
        CHECK(p <= M_PI);
    }
    CHECK_THROWS_AS(fp::grouped_phases(GrayImage(5, 5, 0.0), b), fp::KernelTooLarge);
}

TEST_CASE("orientation_mask: nearest bin, ties low, seam wrap, stride upsampling") {
    fp::GaborBank b2 = fp::gabor_bank(1.0 / 9.0, 2, 4.5, 25);
    fp::OrientationField f;
    f.stride = 1;
    f.angles = GrayImage(3, 1);
    f.angles.at(0, 0) = 90.0; // exact bin
    f.angles.at(1, 0) = 45.0; // tie -> lower
    f.angles.at(2, 0) = 10.0;
    fp::OrientationMask m = fp::orientation_mask(f, b2);
    CHECK(m.at(0, 0, 1) == 1.0);
    CHECK(m.at(0, 0, 0) == 0.0);
    CHECK(m.at(1, 0, 0) == 1.0);
    CHECK(m.at(2, 0, 0) == 1.0);
    for (int x = 0; x < 3; ++x) {
        double sum = 0.0;
        for (int c = 0; c < 2; ++c) sum += m.at(x, 0, c);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
    }

    fp::GaborBank b90 = fp::gabor_bank(1.0 / 9.0, 90, 4.5, 25);
    fp::OrientationField seam;
    seam.stride = 1;
    seam.angles = GrayImage(1, 1, 179.5);
    fp::OrientationMask sm = fp::orientation_mask(seam, b90);
    CHECK(sm.at(0, 0, 0) == 1.0);

    fp::OrientationField strided;
    strided.stride = 8;
    strided.angles = GrayImage(2, 1);
    strided.angles.at(0, 0) = 0.0;
    strided.angles.at(1, 0) = 90.0;
    fp::OrientationMask um = fp::orientation_mask(strided, b2, 13, 5);
    CHECK(um.width == 13);
    CHECK(um.height == 5);
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 13; ++x) {
            CHECK(um.at(x, y, 0) == (x < 8 ? 1.0 : 0.0));
            CHECK(um.at(x, y, 1) == (x < 8 ? 0.0 : 1.0));
        }

    fp::OrientationField bad;
    bad.stride = 1;
    bad.angles = GrayImage(1, 1, 180.0);
    CHECK_THROWS_AS(fp::orientation_mask(bad, b2), fp::AngleOutOfRange);
}

TEST_CASE("soft_orientation_mask: probabilities pass through with validation") {
    fp::GaborBank b = fp::gabor_bank(1.0 / 9.0, 90, 4.5, 25);
    GrayImage angles(4, 3);
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 4; ++x) angles.at(x, y) = std::fmod(31.0 * (y * 4 + x), 180.0);
    fp::AngleDistribution dist = fp::encode_angles(angles, fp::AngleCoding{90, 180, 5.0});
    fp::OrientationMask m = fp::soft_orientation_mask(dist, b);
    CHECK(m.width == 4);
    CHECK(m.channels == 90);
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 4; ++x) {
            double sum = 0.0;
            for (int c = 0; c < 90; ++c) {
                sum += m.at(x, y, c);
                CHECK(m.at(x, y, c) >= 0.0);
                CHECK(m.at(x, y, c) <= 1.0);
            }
            CHECK(std::fabs(sum - 1.0) <= 1e-6);
        }

    // one-hot distribution behaves exactly like the hard mask
    fp::AngleDistribution onehot;
    onehot.width = 1;
    onehot.height = 1;
    onehot.bins = 90;
    onehot.span = 180;
    onehot.probs.assign(90, 0.0);
    onehot.probs[7] = 1.0;
    fp::OrientationField f;
    f.stride = 1;
    f.angles = GrayImage(1, 1, 14.0); // bin 7 center
    fp::OrientationMask hard = fp::orientation_mask(f, b);
    fp::OrientationMask soft = fp::soft_orientation_mask(onehot, b);
    CHECK(hard.mask == soft.mask);

    fp::GaborBank small = fp::gabor_bank(1.0 / 9.0, 8, 4.5, 25);
    CHECK_THROWS_AS(fp::soft_orientation_mask(dist, small), fp::ShapeMismatch);
    fp::AngleDistribution wrong = dist;
    wrong.span = 360;
    CHECK_THROWS_AS(fp::soft_orientation_mask(wrong, b), fp::UnsupportedSpan);
}

TEST_CASE("enhance: hard selection, zero mask, shape checks") {
    oracle::Rng rng(5);
    GrayImage img = oracle::random_image(30, 28, rng);
    fp::GaborBank b = fp::gabor_bank(0.12, 4, 2.5, 9);
    fp::GroupedPhases gp = fp::grouped_phases(img, b);

    fp::OrientationMask pick;
    pick.width = 30;
    pick.height = 28;
    pick.channels = 4;
    pick.mask.assign(static_cast<size_t>(30) * 28 * 4, 0.0);
    for (int y = 0; y < 28; ++y)
        for (int x = 0; x < 30; ++x) pick.at(x, y, 2) = 1.0;
    fp::EnhancedMap e = fp::enhance(gp, pick);
    for (int y = 0; y < 28; ++y)
        for (int x = 0; x < 30; ++x) CHECK(e.phase.at(x, y) == gp.at(x, y, 2));
    CHECK(e.amplitude.size() == 0);

    fp::OrientationMask zero = pick;
    std::fill(zero.mask.begin(), zero.mask.end(), 0.0);
    fp::EnhancedMap ez = fp::enhance(gp, zero);
    for (double v : ez.phase.pixels) CHECK(v == 0.0);

    fp::OrientationMask wrong = pick;
    wrong.width = 29;
    wrong.mask.resize(static_cast<size_t>(29) * 28 * 4);
    CHECK_THROWS_AS(fp::enhance(gp, wrong), fp::ShapeMismatch);

    GrayImage cosed = fp::enhanced_cosine(e);
    for (size_t i = 0; i < cosed.size(); ++i)
        CHECK(cosed.pixels[i] == std::cos(e.phase.pixels[i]));
}

TEST_CASE("selective convolution equals region-wise direct filtering") {
    // two half planes: horizontal ridges left of the seam, vertical right
    const int W = 128, H = 128, seam = 64;
    GrayImage left = sinusoid(W, H, 0.0, 9.0);
    GrayImage right = sinusoid(W, H, 90.0, 9.0);
    GrayImage img(W, H);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) img.at(x, y) = x < seam ? left.at(x, y) : right.at(x, y);

    fp::OrientationField field;
    field.stride = 1;
    field.angles = GrayImage(W, H);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) field.angles.at(x, y) = x < seam ? 0.0 : 90.0;

    fp::GaborBank bank = fp::gabor_bank(1.0 / 9.0, 2, 4.5, 25);
    fp::EnhancedMap e = fp::enhance(fp::grouped_phases(img, bank), fp::orientation_mask(field, bank));

    GrayImage re0, im0, re1, im1;
    direct_response(img, bank, 0, re0, im0);
    direct_response(img, bank, 1, re1, im1);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            if (std::abs(x - seam) < 13) continue;
            const double rr = x < seam ? re0.at(x, y) : re1.at(x, y);
            const double ii = x < seam ? im0.at(x, y) : im1.at(x, y);
            double want = std::hypot(rr, ii) < 1e-9 ? 0.0 : std::atan2(ii, rr);
            if (want <= -M_PI) want = M_PI;
            CHECK(std::fabs(wrap_pi(e.phase.at(x, y) - want)) <= 1e-9);
        }
}

TEST_CASE("enhance_with_field matches the full composition bit for bit") {
    fp::SynthSpec spec;
    spec.width = 77;
    spec.height = 70;
    spec.orientation_deg = 15.0;
    spec.period = 8.0;
    spec.noise_sigma = 0.35;
    spec.minutiae.push_back({30.0, 30.0, 1});
    spec.minutiae.push_back({55.0, 48.0, -1});
    GrayImage img = fp::synth_print(spec, 21).image;

    auto [gx, gy] = fp::sobel_gradients(img);
    fp::OrientationField field = fp::orientation_field(fp::structure_tensor(gx, gy, 16), 8);
    fp::GaborBank bank = fp::gabor_bank(1.0 / 8.0, 8, 3.0, 13);

    std::vector<GrayImage> amps;
    fp::GroupedPhases gp = fp::grouped_phases(img, bank, &amps);
    fp::OrientationMask mask = fp::orientation_mask(field, bank, 77, 70);
    fp::EnhancedMap ref = fp::enhance(gp, mask, amps);
    fp::EnhancedMap fused = fp::enhance_with_field(img, field, bank);

    REQUIRE(fused.phase.same_shape(ref.phase));
    for (size_t i = 0; i < ref.phase.size(); ++i) {
        CHECK(fused.phase.pixels[i] == ref.phase.pixels[i]);
        CHECK(fused.amplitude.pixels[i] == ref.amplitude.pixels[i]);
    }

    fp::OrientationField wrong = field;
    wrong.stride = 16;
    CHECK_THROWS_AS(fp::enhance_with_field(img, wrong, bank), fp::ShapeMismatch);
}

TEST_CASE("phase fidelity: clean print phase is reproduced up to a constant") {
    fp::SynthSpec spec;
    spec.width = 128;
    spec.height = 128;
    spec.orientation_deg = 37.0;
    spec.period = 9.0;
    spec.global_phase = 0.3;
    GrayImage img = fp::synth_print(spec, 0).image;

    fp::OrientationField field;
    field.stride = 8;
    field.angles = GrayImage(16, 16, 37.0);
    fp::GaborBank bank = fp::gabor_bank(1.0 / 9.0, 90, 4.5, 25);
    fp::EnhancedMap e = fp::enhance_with_field(img, field, bank);

    double sr = 0.0, si = 0.0;
    int n = 0;
    const double beta = fp::deg2rad(37.0 + 90.0);
    for (int y = 16; y < 112; ++y)
        for (int x = 16; x < 112; ++x) {
            const double psi =
                (2.0 * M_PI / 9.0) * (x * std::cos(beta) + y * std::sin(beta)) + 0.3;
            const double d = e.phase.at(x, y) - psi;
            sr += std::cos(d);
            si += std::sin(d);
            ++n;
        }
    CHECK(std::sqrt(sr * sr + si * si) / n >= 0.99);
}

TEST_CASE("noise robustness: enhanced cosine stays close to the clean pattern") {
    fp::SynthSpec clean_spec;
    clean_spec.width = 128;
    clean_spec.height = 128;
    clean_spec.orientation_deg = 70.0;
    clean_spec.period = 9.0;
    GrayImage clean = fp::synth_print(clean_spec, 0).image;

    fp::SynthSpec noisy_spec = clean_spec;
    noisy_spec.noise_sigma = 0.5; // half the unit amplitude
    GrayImage noisy = fp::synth_print(noisy_spec, 3).image;

    fp::OrientationField field;
    field.stride = 8;
    field.angles = GrayImage(16, 16, 70.0);
    fp::GaborBank bank = fp::gabor_bank(1.0 / 9.0, 90, 4.5, 25);
    GrayImage enhanced = fp::enhanced_cosine(fp::enhance_with_field(noisy, field, bank));

    double sa = 0.0, sb = 0.0, saa = 0.0, sbb = 0.0, sab = 0.0;
    int n = 0;
    for (int y = 16; y < 112; ++y)
        for (int x = 16; x < 112; ++x) {
            const double a = enhanced.at(x, y), b = clean.at(x, y);
            sa += a;
            sb += b;
            saa += a * a;
            sbb += b * b;
            sab += a * b;
            ++n;
        }
    const double cov = sab / n - (sa / n) * (sb / n);
    const double va = saa / n - (sa / n) * (sa / n);
    const double vb = sbb / n - (sb / n) * (sb / n);
    CHECK(cov / std::sqrt(va * vb) >= 0.9);
}
