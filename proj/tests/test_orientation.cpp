#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "fp/orientation.hpp"
#include "fp/synth.hpp"
#include "oracles.hpp"

using fp::GrayImage;

namespace {

double circ_diff180(double a, double b) {
    double d = std::fabs(a - b);
    d = std::fmod(d, 180.0);
    return std::min(d, 180.0 - d);
}

GrayImage sinusoid(int w, int h, double theta_deg, double period) {
    fp::SynthSpec spec;
    spec.width = w;
    spec.height = h;
    spec.orientation_deg = theta_deg;
    spec.period = period;
    return fp::synth_print(spec, 0).image;
}

// Interior mean of |estimated - expected| on the doubled circle.
double field_error(const GrayImage& img, double expected_deg, int stride) {
    auto [gx, gy] = fp::sobel_gradients(img);
    fp::StructureTensor t = fp::structure_tensor(gx, gy, 16);
    fp::OrientationField f = fp::orientation_field(t, stride);
    const int margin = (24 + stride - 1) / stride;
    double sum = 0.0;
    int count = 0;
    for (int cy = margin; cy < f.angles.height - margin; ++cy)
        for (int cx = margin; cx < f.angles.width - margin; ++cx) {
            sum += circ_diff180(f.angles.at(cx, cy), expected_deg);
            ++count;
        }
    REQUIRE(count > 0);
    return sum / count;
}

} // namespace

TEST_CASE("sobel: ramps produce constant interior gradients") {
    GrayImage rx(12, 10), ry(12, 10);
    for (int y = 0; y < 10; ++y)
        for (int x = 0; x < 12; ++x) {
            rx.at(x, y) = x;
            ry.at(x, y) = y;
        }
    auto [gx1, gy1] = fp::sobel_gradients(rx);
    auto [gx2, gy2] = fp::sobel_gradients(ry);
    for (int y = 1; y < 9; ++y)
        for (int x = 1; x < 11; ++x) {
            CHECK(gx1.at(x, y) == doctest::Approx(8.0));
            CHECK(gy1.at(x, y) == doctest::Approx(0.0));
            CHECK(gx2.at(x, y) == doctest::Approx(0.0));
            CHECK(gy2.at(x, y) == doctest::Approx(8.0));
        }
}

TEST_CASE("sobel: horizontal sinusoid gradients follow the sampled derivative") {
    const double T = 9.0;
    GrayImage img(20, 40);
    for (int y = 0; y < 40; ++y)
        for (int x = 0; x < 20; ++x) img.at(x, y) = std::sin(2.0 * M_PI * y / T);
    auto [gx, gy] = fp::sobel_gradients(img);
    for (int y = 1; y < 39; ++y)
        for (int x = 1; x < 19; ++x) {
            CHECK(std::fabs(gx.at(x, y)) <= 1e-12);
            const double want = 4.0 * (img.at(x, y + 1) - img.at(x, y - 1));
            CHECK(gy.at(x, y) == doctest::Approx(want).epsilon(1e-12));
        }
}

TEST_CASE("structure_tensor: zero on constant images, PSD on random ones") {
    GrayImage flat(20, 20, 3.0);
    auto [gx, gy] = fp::sobel_gradients(flat);
    fp::StructureTensor t = fp::structure_tensor(gx, gy, 8);
    for (size_t i = 0; i < t.gxx.size(); ++i) {
        CHECK(t.gxx.pixels[i] == 0.0);
        CHECK(t.gyy.pixels[i] == 0.0);
        CHECK(t.gxy.pixels[i] == 0.0);
    }

    oracle::Rng rng(31);
    GrayImage img = oracle::random_image(24, 24, rng);
    auto [rgx, rgy] = fp::sobel_gradients(img);
    fp::StructureTensor rt = fp::structure_tensor(rgx, rgy, 5);
    for (size_t i = 0; i < rt.gxx.size(); ++i) {
        CHECK(rt.gxx.pixels[i] >= 0.0);
        CHECK(rt.gyy.pixels[i] >= 0.0);
        CHECK(rt.gxx.pixels[i] * rt.gyy.pixels[i] - rt.gxy.pixels[i] * rt.gxy.pixels[i] >= -1e-9);
    }

    GrayImage small(3, 3);
    CHECK_THROWS_AS(fp::structure_tensor(rgx, small, 5), fp::ShapeMismatch);
}

TEST_CASE("orientation_field: axis-aligned and oblique sinusoids") {
    CHECK(field_error(sinusoid(96, 96, 0.0, 9.0), 0.0, 1) < 0.5);
    CHECK(field_error(sinusoid(96, 96, 90.0, 9.0), 90.0, 1) < 0.5);
    CHECK(field_error(sinusoid(96, 96, 45.0, 9.0), 45.0, 1) < 2.0);
    CHECK(field_error(sinusoid(96, 96, 135.0, 8.0), 135.0, 8) < 2.0);
    CHECK(field_error(sinusoid(96, 96, 30.0, 11.0), 30.0, 8) < 2.0);
}

TEST_CASE("orientation_field: stride geometry and cell-center sampling") {
    // Hand-built tensor whose angle depends only on x: gxy sign flips make
    // the cell value identify which pixel was sampled.
    fp::StructureTensor t;
    t.gxx = GrayImage(20, 12, 1.0);
    t.gyy = GrayImage(20, 12, 0.0);
    t.gxy = GrayImage(20, 12, 0.0);
    for (int y = 0; y < 12; ++y)
        for (int x = 0; x < 20; ++x) t.gxy.at(x, y) = (x % 8 == 4) ? 0.5 : 0.0;

    fp::OrientationField f = fp::orientation_field(t, 8);
    CHECK(f.angles.width == 3);  // ceil(20/8)
    CHECK(f.angles.height == 2); // ceil(12/8)
    // cells 0 and 1 sample x=4 and x=12 (both x%8==4), cell 2 clamps to x=19
    CHECK(f.angles.at(0, 0) == doctest::Approx(112.5));
    CHECK(f.angles.at(1, 0) == doctest::Approx(112.5));
    CHECK(f.angles.at(2, 0) == doctest::Approx(90.0));

    CHECK_THROWS_AS(fp::orientation_field(t, 0), fp::InvalidFactor);
}

TEST_CASE("orientation_field: angles stay in [0, 180)") {
    oracle::Rng rng(77);
    GrayImage img = oracle::random_image(32, 32, rng);
    auto [gx, gy] = fp::sobel_gradients(img);
    fp::OrientationField f = fp::orientation_field(fp::structure_tensor(gx, gy, 4), 1);
    for (double a : f.angles.pixels) {
        CHECK(a >= 0.0);
        CHECK(a < 180.0);
    }
}

TEST_CASE("coherence: high on sinusoids, low on isotropic noise, always [0,1]") {
    GrayImage ridge = sinusoid(64, 64, 25.0, 9.0);
    auto [gx, gy] = fp::sobel_gradients(ridge);
    GrayImage c1 = fp::coherence(fp::structure_tensor(gx, gy, 16));
    for (int y = 24; y < 40; ++y)
        for (int x = 24; x < 40; ++x) CHECK(c1.at(x, y) >= 0.9);

    oracle::Rng rng(5);
    GrayImage noise(64, 64);
    for (auto& p : noise.pixels) p = rng.gaussian();
    auto [nx, ny] = fp::sobel_gradients(noise);
    GrayImage c2 = fp::coherence(fp::structure_tensor(nx, ny, 16));
    double mean = 0.0;
    int count = 0;
    for (int y = 24; y < 40; ++y)
        for (int x = 24; x < 40; ++x) {
            mean += c2.at(x, y);
            ++count;
        }
    CHECK(mean / count <= 0.3);
    for (double v : c1.pixels) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }

    // flat tensor: 0/eps stays zero
    fp::StructureTensor flat;
    flat.gxx = GrayImage(4, 4, 0.0);
    flat.gyy = GrayImage(4, 4, 0.0);
    flat.gxy = GrayImage(4, 4, 0.0);
    for (double v : fp::coherence(flat).pixels) CHECK(v == 0.0);
}

TEST_CASE("encode_angle: peak at nearest bin, circular symmetry, unit mass") {
    const fp::AngleCoding coding{90, 180, 5.0};
    auto p = fp::encode_angle(47.0, coding);
    REQUIRE(p.size() == 90);
    double sum = 0.0;
    int best = 0;
    for (int i = 0; i < 90; ++i) {
        sum += p[i];
        if (p[i] > p[best]) best = i;
    }
    CHECK(std::fabs(sum - 1.0) <= 1e-9);
    // 47 deg ties bins 23 (46 deg) and 24 (48 deg); argmax picks the lower
    CHECK(best == 23);
    CHECK(p[23] == doctest::Approx(p[24]));

    // seam: 179 deg is 1 deg from bin 0 and bin 89 alike
    auto q = fp::encode_angle(179.0, coding);
    CHECK(q[0] == doctest::Approx(q[89]));
    CHECK(q[0] > q[44]);

    auto r = fp::encode_angle(0.0, coding);
    CHECK(r[1] == doctest::Approx(r[89]));
    CHECK(r[0] > r[1]);

    CHECK_THROWS_AS(fp::encode_angle(180.0, coding), fp::AngleOutOfRange);
    CHECK_THROWS_AS(fp::encode_angle(-0.5, coding), fp::AngleOutOfRange);
    CHECK_THROWS_AS(fp::encode_angle(10.0, fp::AngleCoding{90, 180, 0.0}), fp::Error);
}

TEST_CASE("decode_theta_max: one-hot cells, ties to the lower bin, scale free") {
    fp::AngleDistribution dist;
    dist.width = 2;
    dist.height = 1;
    dist.bins = 90;
    dist.span = 180;
    dist.probs.assign(2 * 90, 0.0);
    dist.at(0, 0, 37) = 1.0;
    for (int i = 0; i < 90; ++i) dist.at(1, 0, i) = 1.0 / 90.0; // uniform: ties -> bin 0

    GrayImage angles = fp::decode_theta_max(dist);
    CHECK(angles.at(0, 0) == 74.0);
    CHECK(angles.at(1, 0) == 0.0);

    for (auto& v : dist.probs) v *= 123.0; // decoder only compares
    GrayImage scaled = fp::decode_theta_max(dist);
    CHECK(scaled.at(0, 0) == 74.0);
    CHECK(scaled.at(1, 0) == 0.0);
}

TEST_CASE("decode_theta_ave: circular mean, confidence, span guard") {
    fp::AngleDistribution dist;
    dist.width = 1;
    dist.height = 1;
    dist.bins = 90;
    dist.span = 180;
    dist.probs.assign(90, 0.0);
    dist.probs[0] = 0.5;  // 0 deg
    dist.probs[85] = 0.5; // 170 deg
    fp::ThetaAveResult res = fp::decode_theta_ave(dist);
    CHECK(res.angles.at(0, 0) == doctest::Approx(175.0).epsilon(1e-9));

    fp::AngleDistribution uniform = dist;
    for (auto& v : uniform.probs) v = 1.0 / 90.0;
    fp::ThetaAveResult ur = fp::decode_theta_ave(uniform);
    CHECK(ur.confidence.at(0, 0) < fp::kThetaAveConfidenceFloor);

    fp::AngleDistribution onehot = dist;
    std::fill(onehot.probs.begin(), onehot.probs.end(), 0.0);
    onehot.probs[61] = 1.0;
    fp::ThetaAveResult oh = fp::decode_theta_ave(onehot);
    CHECK(oh.angles.at(0, 0) == doctest::Approx(122.0).epsilon(1e-9));
    CHECK(oh.confidence.at(0, 0) == doctest::Approx(1.0));

    fp::AngleDistribution wrong = dist;
    wrong.span = 360;
    CHECK_THROWS_AS(fp::decode_theta_ave(wrong), fp::UnsupportedSpan);
}

TEST_CASE("codec round trips: encode then decode stays within half a bin") {
    for (double sigma : {2.0, 5.0, 10.0}) {
        const fp::AngleCoding coding{90, 180, sigma};
        for (int deg = 0; deg < 180; ++deg) {
            GrayImage one(1, 1, static_cast<double>(deg));
            fp::AngleDistribution dist = fp::encode_angles(one, coding);
            const double dm = fp::decode_theta_max(dist).at(0, 0);
            CHECK(circ_diff180(dm, deg) <= 1.0);
            const fp::ThetaAveResult av = fp::decode_theta_ave(dist);
            CHECK(circ_diff180(av.angles.at(0, 0), deg) <= 0.5);
            CHECK(av.confidence.at(0, 0) > fp::kThetaAveConfidenceFloor);
        }
    }
}

TEST_CASE("orientation field text format round trips") {
    fp::OrientationField f;
    f.stride = 8;
    f.angles = GrayImage(5, 3);
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 5; ++x) f.angles.at(x, y) = std::fmod(37.3 * (y * 5 + x), 180.0);

    fp::write_orientation_field("tmp_field.txt", f);
    fp::OrientationField back = fp::read_orientation_field("tmp_field.txt");
    CHECK(back.stride == 8);
    REQUIRE(back.angles.width == 5);
    REQUIRE(back.angles.height == 3);
    for (size_t i = 0; i < f.angles.size(); ++i)
        CHECK(std::fabs(back.angles.pixels[i] - f.angles.pixels[i]) <= 0.05 + 1e-12);

    // one-decimal values survive exactly
    fp::write_orientation_field("tmp_field2.txt", back);
    std::ifstream f1("tmp_field.txt"), f2("tmp_field2.txt");
    std::string s1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    std::string s2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(s1 == s2);
    std::remove("tmp_field.txt");
    std::remove("tmp_field2.txt");
}

TEST_CASE("orientation field text format rejects bad content") {
    {
        std::ofstream out("tmp_bad1.txt");
        out << "3 2\n0.0 1.0 2.0\n3.0 4.0 5.0\n"; // missing stride
    }
    CHECK_THROWS_AS(fp::read_orientation_field("tmp_bad1.txt"), fp::ParseError);
    std::remove("tmp_bad1.txt");

    {
        std::ofstream out("tmp_bad2.txt");
        out << "2 2 8\n0.0 1.0\n190.0 4.0\n"; // angle out of range on line 3
    }
    try {
        fp::read_orientation_field("tmp_bad2.txt");
        FAIL("expected ParseError");
    } catch (const fp::ParseError& e) {
        CHECK(std::string(e.what()).find(":3:") != std::string::npos);
    }
    std::remove("tmp_bad2.txt");

    CHECK_THROWS_AS(fp::read_orientation_field("tmp_absent.txt"), fp::IoError);
}

TEST_CASE("rotating a ridge image by 90 degrees shifts orientations by 90") {
    GrayImage img = sinusoid(96, 96, 55.0, 9.0);
    GrayImage rot(96, 96);
    for (int y = 0; y < 96; ++y)
        for (int x = 0; x < 96; ++x) rot.at(x, y) = img.at(y, 95 - x);

    auto [gx, gy] = fp::sobel_gradients(img);
    auto [rx, ry] = fp::sobel_gradients(rot);
    fp::OrientationField f1 = fp::orientation_field(fp::structure_tensor(gx, gy, 16), 8);
    fp::OrientationField f2 = fp::orientation_field(fp::structure_tensor(rx, ry, 16), 8);

    double e1 = 0.0, e2 = 0.0;
    int n = 0;
    for (int cy = 4; cy < f1.angles.height - 4; ++cy)
        for (int cx = 4; cx < f1.angles.width - 4; ++cx) {
            e1 += circ_diff180(f1.angles.at(cx, cy), 55.0);
            e2 += circ_diff180(f2.angles.at(cx, cy), 145.0);
            ++n;
        }
    CHECK(e1 / n < 2.0);
    CHECK(e2 / n < 2.0);
}
