#include "fp/orientation.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace fp {

double deg2rad(double d) { return d * (M_PI / 180.0); }
double rad2deg(double r) { return r * (180.0 / M_PI); }

Kernel sobel_x_kernel() {
    // Flipped for true convolution; effective correlation mask is
    // [-1 0 1; -2 0 2; -1 0 1] with x growing to the right.
    Kernel k(3, 3);
    k.taps = {1, 0, -1, 2, 0, -2, 1, 0, -1};
    return k;
}

Kernel sobel_y_kernel() {
    Kernel k(3, 3);
    k.taps = {1, 2, 1, 0, 0, 0, -1, -2, -1};
    return k;
}

std::pair<GrayImage, GrayImage> sobel_gradients(const GrayImage& image) {
    return {conv2d(image, sobel_x_kernel(), PaddingMode::Replicate),
            conv2d(image, sobel_y_kernel(), PaddingMode::Replicate)};
}

StructureTensor structure_tensor(const GrayImage& gx, const GrayImage& gy, int window) {
    if (!gx.same_shape(gy)) throw ShapeMismatch("structure_tensor: gradient shapes differ");
    if (window < 1) throw InvalidKernel("structure_tensor: window must be >= 1");
    GrayImage xx(gx.width, gx.height), yy(gx.width, gx.height), xy(gx.width, gx.height);
    for (size_t i = 0; i < gx.size(); ++i) {
        xx.pixels[i] = gx.pixels[i] * gx.pixels[i];
        yy.pixels[i] = gy.pixels[i] * gy.pixels[i];
        xy.pixels[i] = gx.pixels[i] * gy.pixels[i];
    }
    StructureTensor t;
    t.gxx = box_sum(xx, window);
    t.gyy = box_sum(yy, window);
    t.gxy = box_sum(xy, window);
    t.window = window;
    return t;
}

namespace {

double cell_angle(const StructureTensor& t, int px, int py) {
    const double gxx = t.gxx.at(px, py), gyy = t.gyy.at(px, py), gxy = t.gxy.at(px, py);
    double theta = 90.0 + 0.5 * rad2deg(std::atan2(2.0 * gxy, gxx - gyy));
    theta = std::fmod(theta, 180.0);
    if (theta < 0.0) theta += 180.0;
    return theta;
}

} // namespace

OrientationField orientation_field(const StructureTensor& t, int stride) {
    if (stride < 1) throw InvalidFactor("orientation_field: stride must be >= 1");
    const int W = t.gxx.width, H = t.gxx.height;
    const int cw = (W + stride - 1) / stride;
    const int ch = (H + stride - 1) / stride;
    OrientationField field;
    field.stride = stride;
    field.angles = GrayImage(cw, ch);
    for (int cy = 0; cy < ch; ++cy) {
        for (int cx = 0; cx < cw; ++cx) {
            const int px = std::min(cx * stride + stride / 2, W - 1);
            const int py = std::min(cy * stride + stride / 2, H - 1);
            field.angles.at(cx, cy) = cell_angle(t, px, py);
        }
    }
    return field;
}

GrayImage coherence(const StructureTensor& t) {
    constexpr double eps = 1e-12;
    GrayImage out(t.gxx.width, t.gxx.height);
    for (size_t i = 0; i < out.size(); ++i) {
        const double gxx = t.gxx.pixels[i], gyy = t.gyy.pixels[i], gxy = t.gxy.pixels[i];
        const double num = std::sqrt((gxx - gyy) * (gxx - gyy) + 4.0 * gxy * gxy);
        double c = num / (gxx + gyy + eps);
        if (c < 0.0) c = 0.0;
        if (c > 1.0) c = 1.0;
        out.pixels[i] = c;
    }
    return out;
}

std::vector<double> encode_angle(double theta_deg, const AngleCoding& coding) {
    if (coding.bins < 2) throw Error("encode_angle: need at least 2 bins");
    if (coding.sigma <= 0.0) throw Error("encode_angle: sigma must be positive");
    if (!(theta_deg >= 0.0) || theta_deg >= coding.span)
        throw AngleOutOfRange("encode_angle: angle " + std::to_string(theta_deg) +
                              " outside [0, " + std::to_string(coding.span) + ")");
    const int step = coding.span / coding.bins;
    if (step < 1) throw Error("encode_angle: more bins than degrees in span");

    std::vector<double> p(coding.bins);
    double sum = 0.0;
    for (int i = 0; i < coding.bins; ++i) {
        double d = std::fabs(theta_deg - static_cast<double>(step * i));
        d = std::min(d, coding.span - d);
        p[i] = std::exp(-d * d / (2.0 * coding.sigma * coding.sigma));
        sum += p[i];
    }
    for (double& v : p) v /= sum;
    return p;
}

AngleDistribution encode_angles(const GrayImage& angles, const AngleCoding& coding) {
    AngleDistribution dist;
    dist.width = angles.width;
    dist.height = angles.height;
    dist.bins = coding.bins;
    dist.span = coding.span;
    dist.probs.resize(angles.size() * coding.bins);
    for (int y = 0; y < angles.height; ++y)
        for (int x = 0; x < angles.width; ++x) {
            std::vector<double> p = encode_angle(angles.at(x, y), coding);
            std::copy(p.begin(), p.end(), dist.probs.begin() + (static_cast<size_t>(y) * angles.width + x) * coding.bins);
        }
    return dist;
}

GrayImage decode_theta_max(const AngleDistribution& dist) {
    if (dist.bins < 1) throw Error("decode_theta_max: empty distribution");
    const int step = dist.span / dist.bins;
    GrayImage out(dist.width, dist.height);
    for (int y = 0; y < dist.height; ++y)
        for (int x = 0; x < dist.width; ++x) {
            int best = 0;
            double bp = dist.at(x, y, 0);
            for (int i = 1; i < dist.bins; ++i)
                if (dist.at(x, y, i) > bp) {
                    bp = dist.at(x, y, i);
                    best = i;
                }
            out.at(x, y) = static_cast<double>(step * best);
        }
    return out;
}

ThetaAveResult decode_theta_ave(const AngleDistribution& dist) {
    if (dist.span != 180)
        throw UnsupportedSpan("decode_theta_ave: span must be 180, got " + std::to_string(dist.span));
    const int step = dist.span / dist.bins;
    ThetaAveResult res;
    res.angles = GrayImage(dist.width, dist.height);
    res.confidence = GrayImage(dist.width, dist.height);
    for (int y = 0; y < dist.height; ++y)
        for (int x = 0; x < dist.width; ++x) {
            double dcos = 0.0, dsin = 0.0;
            for (int i = 0; i < dist.bins; ++i) {
                const double a = deg2rad(2.0 * step * i);
                dcos += dist.at(x, y, i) * std::cos(a);
                dsin += dist.at(x, y, i) * std::sin(a);
            }
            // The defining sums carry a 1/bins factor; it cancels in atan2 and
            // is deliberately left out of the confidence so that a one-hot cell
            // scores 1 regardless of bin count.
            double theta = 0.5 * rad2deg(std::atan2(dsin / dist.bins, dcos / dist.bins));
            if (theta < 0.0) theta += 180.0;
            if (theta >= 180.0) theta -= 180.0;
            res.angles.at(x, y) = theta;
            res.confidence.at(x, y) = std::sqrt(dcos * dcos + dsin * dsin);
        }
    return res;
}

void write_orientation_field(const std::string& path, const OrientationField& field) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << field.angles.width << " " << field.angles.height << " " << field.stride << "\n";
    char buf[32];
    for (int y = 0; y < field.angles.height; ++y) {
        for (int x = 0; x < field.angles.width; ++x) {
            double a = std::fmod(field.angles.at(x, y), 180.0);
            if (a < 0.0) a += 180.0;
            if (a > 179.95) a = 0.0; // would print as 180.0 otherwise
            std::snprintf(buf, sizeof buf, "%.1f", a);
            out << buf << (x + 1 == field.angles.width ? '\n' : ' ');
        }
    }
    if (!out) throw IoError("failed writing '" + path + "'");
}

OrientationField read_orientation_field(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ":1: missing header");
    std::istringstream header(line);
    int w = 0, h = 0, stride = 0;
    if (!(header >> w >> h >> stride) || w <= 0 || h <= 0 || stride <= 0)
        throw ParseError(path + ":1: header must be 'W H stride'");

    OrientationField field;
    field.stride = stride;
    field.angles = GrayImage(w, h);
    for (int y = 0; y < h; ++y) {
        if (!std::getline(in, line))
            throw ParseError(path + ":" + std::to_string(y + 2) + ": missing row");
        std::istringstream row(line);
        for (int x = 0; x < w; ++x) {
            double a = 0.0;
            if (!(row >> a) || !(a >= 0.0) || a >= 180.0)
                throw ParseError(path + ":" + std::to_string(y + 2) + ": bad angle at column " +
                                 std::to_string(x));
            field.angles.at(x, y) = a;
        }
    }
    return field;
}

} // namespace fp
