#include "fp/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fp/errors.hpp"

namespace fp {

namespace {

struct Pt {
    double x, y;
};

double cross(const Pt& o, const Pt& a, const Pt& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Andrew monotone chain; returns CCW vertices, possibly 1 or 2 for
// degenerate inputs.
std::vector<Pt> convex_hull(std::vector<Pt> pts) {
    std::sort(pts.begin(), pts.end(), [](const Pt& a, const Pt& b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Pt& a, const Pt& b) { return a.x == b.x && a.y == b.y; }),
              pts.end());
    const int n = static_cast<int>(pts.size());
    if (n <= 2) return pts;
    std::vector<Pt> h(2 * n);
    int k = 0;
    for (int i = 0; i < n; ++i) {
        while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0.0) --k;
        h[k++] = pts[i];
    }
    for (int i = n - 2, lower = k + 1; i >= 0; --i) {
        while (k >= lower && cross(h[k - 2], h[k - 1], pts[i]) <= 0.0) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    return h;
}

double dist_point_segment(const Pt& p, const Pt& a, const Pt& b) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
    t = std::min(std::max(t, 0.0), 1.0);
    const double qx = a.x + t * dx - p.x, qy = a.y + t * dy - p.y;
    return std::sqrt(qx * qx + qy * qy);
}

bool inside_hull(const Pt& p, const std::vector<Pt>& hull) {
    if (hull.size() < 3) return false;
    for (size_t i = 0; i < hull.size(); ++i) {
        const Pt& a = hull[i];
        const Pt& b = hull[(i + 1) % hull.size()];
        if (cross(a, b, p) < -1e-9) return false;
    }
    return true;
}

double dist_to_hull(const Pt& p, const std::vector<Pt>& hull) {
    if (hull.size() == 1) {
        return std::hypot(p.x - hull[0].x, p.y - hull[0].y);
    }
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < hull.size(); ++i)
        best = std::min(best, dist_point_segment(p, hull[i], hull[(i + 1) % hull.size()]));
    return best;
}

// Felzenszwalb-Huttenlocher 1D squared distance transform.
void edt_1d(std::vector<double>& f, std::vector<double>& d, std::vector<int>& v,
            std::vector<double>& z) {
    const int n = static_cast<int>(f.size());
    const double kInf = std::numeric_limits<double>::infinity();
    int k = 0;
    v[0] = 0;
    z[0] = -kInf;
    z[1] = kInf;
    for (int q = 1; q < n; ++q) {
        double s;
        while (true) {
            s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
            if (s > z[k]) break;
            --k;
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = kInf;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        const double dq = q - v[k];
        d[q] = dq * dq + f[v[k]];
    }
}

} // namespace

SegFeatures seg_features(const GrayImage& image, const StructureTensor& t, int window) {
    if (!image.same_shape(t.gxx))
        throw ShapeMismatch("seg_features: image and tensor dimensions differ");
    if (window < 1) throw InvalidFactor("seg_features: window must be >= 1");

    SegFeatures f;
    f.window = window;
    f.coh = coherence(t);
    const double area = static_cast<double>(window) * window;
    f.mean = box_sum(image, window);
    for (double& v : f.mean.pixels) v /= area;

    GrayImage dev2(image.width, image.height);
    for (size_t i = 0; i < image.size(); ++i) {
        const double d = image.pixels[i] - f.mean.pixels[i];
        dev2.pixels[i] = d * d;
    }
    f.var = box_sum(dev2, window);
    for (double& v : f.var.pixels) v /= area;
    return f;
}

SegClassifier SegClassifier::defaults() {
    // Output of: fpx fit-seg --n 400 --seed 2026 (window 16, 500 iterations,
    // learning rate 0.5).
    SegClassifier c;
    c.weights = {11.939675, 0.008894, 2.116299};
    c.bias = -7.110955;
    return c;
}

SegmentationMap seg_classify(const SegFeatures& f, const SegClassifier& c) {
    if (!f.coh.same_shape(f.mean) || !f.coh.same_shape(f.var))
        throw ShapeMismatch("seg_classify: feature rasters differ in shape");
    SegmentationMap m;
    m.stride = 1;
    m.scores = GrayImage(f.coh.width, f.coh.height);
    for (size_t i = 0; i < m.scores.size(); ++i)
        m.scores.pixels[i] = c.weights[0] * f.coh.pixels[i] + c.weights[1] * f.mean.pixels[i] +
                             c.weights[2] * f.var.pixels[i] + c.bias;
    return m;
}

SegmentationMap pool_scores(const SegmentationMap& m, int stride) {
    if (stride < 1) throw InvalidFactor("pool_scores: stride must be >= 1");
    const int cw = (m.scores.width + stride - 1) / stride;
    const int ch = (m.scores.height + stride - 1) / stride;
    SegmentationMap out;
    out.stride = m.stride * stride;
    out.scores = GrayImage(cw, ch);
    for (int cy = 0; cy < ch; ++cy)
        for (int cx = 0; cx < cw; ++cx) {
            const int x1 = std::min((cx + 1) * stride, m.scores.width);
            const int y1 = std::min((cy + 1) * stride, m.scores.height);
            double sum = 0.0;
            int count = 0;
            for (int y = cy * stride; y < y1; ++y)
                for (int x = cx * stride; x < x1; ++x) {
                    sum += m.scores.at(x, y);
                    ++count;
                }
            out.scores.at(cx, cy) = sum / count;
        }
    return out;
}

GrayImage seg_binarize(const SegmentationMap& m, double threshold) {
    GrayImage out(m.scores.width, m.scores.height);
    for (size_t i = 0; i < out.size(); ++i)
        out.pixels[i] = m.scores.pixels[i] > threshold ? 1.0 : 0.0;
    return out;
}

GrayImage convex_hull_mask(const MinutiaeList& minutiae, int width, int height) {
    if (minutiae.empty()) throw EmptyMinutiae("convex_hull_mask: no minutiae");
    if (width < 1 || height < 1) throw InvalidFactor("convex_hull_mask: empty raster");
    std::vector<Pt> pts;
    pts.reserve(minutiae.size());
    for (const Minutia& m : minutiae) pts.push_back({m.x, m.y});
    const std::vector<Pt> hull = convex_hull(std::move(pts));

    GrayImage out(width, height);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const Pt p{static_cast<double>(x), static_cast<double>(y)};
            const bool fg = inside_hull(p, hull) || dist_to_hull(p, hull) <= 0.5;
            out.at(x, y) = fg ? 1.0 : 0.0;
        }
    return out;
}

GrayImage dilate_disk(const GrayImage& mask, double radius) {
    if (radius < 0.0) throw InvalidFactor("dilate_disk: negative radius");
    const int w = mask.width, h = mask.height;
    const double kInf = 1e18;
    GrayImage dist2(w, h);
    for (size_t i = 0; i < mask.size(); ++i)
        dist2.pixels[i] = mask.pixels[i] != 0.0 ? 0.0 : kInf;

    const int n = std::max(w, h);
    std::vector<double> f(n), d(n), z(n + 1);
    std::vector<int> v(n);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) f[x] = dist2.at(x, y);
        f.resize(w);
        d.resize(w);
        edt_1d(f, d, v, z);
        for (int x = 0; x < w; ++x) dist2.at(x, y) = d[x];
        f.resize(n);
        d.resize(n);
    }
    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y) f[y] = dist2.at(x, y);
        f.resize(h);
        d.resize(h);
        edt_1d(f, d, v, z);
        for (int y = 0; y < h; ++y) dist2.at(x, y) = d[y];
        f.resize(n);
        d.resize(n);
    }

    GrayImage out(w, h);
    const double r2 = radius * radius;
    for (size_t i = 0; i < out.size(); ++i) out.pixels[i] = dist2.pixels[i] <= r2 ? 1.0 : 0.0;
    return out;
}

GrayImage majority_smooth(const GrayImage& mask) {
    GrayImage out(mask.width, mask.height);
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x) {
            int count = mask.at(x, y) != 0.0 ? 2 : 0;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const int nx = x + dx, ny = y + dy;
                    if (nx < 0 || nx >= mask.width || ny < 0 || ny >= mask.height) continue;
                    if (mask.at(nx, ny) != 0.0) ++count;
                }
            out.at(x, y) = count >= 5 ? 1.0 : 0.0;
        }
    return out;
}

GrayImage weak_seg_label(const MinutiaeList& minutiae, int width, int height,
                         double dilation_radius) {
    if (minutiae.empty()) throw EmptyMinutiae("weak_seg_label: no minutiae");
    GrayImage hull = convex_hull_mask(minutiae, width, height);
    return majority_smooth(dilate_disk(hull, dilation_radius));
}

std::vector<OrientationLabel> strong_orientation_label(const MinutiaeList& minutiae, int stride,
                                                       int width, int height) {
    if (stride < 1) throw InvalidFactor("strong_orientation_label: stride must be >= 1");
    std::vector<OrientationLabel> out;
    out.reserve(minutiae.size());
    for (const Minutia& m : minutiae) {
        if (m.x < 0.0 || m.x >= width || m.y < 0.0 || m.y >= height)
            throw OutOfBounds("strong_orientation_label: minutia outside the image");
        OrientationLabel lab;
        lab.cell_x = static_cast<int>(std::floor(m.x / stride));
        lab.cell_y = static_cast<int>(std::floor(m.y / stride));
        lab.theta_deg = std::fmod(m.direction_deg, 180.0);
        out.push_back(lab);
    }
    return out;
}

SegClassifier fit_seg_classifier(const std::vector<LabeledPatch>& patches, int window,
                                 int iterations, double learning_rate) {
    if (patches.empty()) throw Error("fit_seg_classifier: no patches");
    const size_t n = patches.size();
    std::vector<std::array<double, 3>> feats(n);
    std::vector<double> labels(n);
    for (size_t i = 0; i < n; ++i) {
        const GrayImage& img = patches[i].image;
        auto [gx, gy] = sobel_gradients(img);
        const StructureTensor t = structure_tensor(gx, gy, window);
        const SegFeatures f = seg_features(img, t, window);
        const int cx = img.width / 2, cy = img.height / 2;
        feats[i] = {f.coh.at(cx, cy), f.mean.at(cx, cy), f.var.at(cx, cy)};
        labels[i] = patches[i].label ? 1.0 : 0.0;
    }

    // Standardize features for conditioning, fold back at the end.
    std::array<double, 3> mu{0, 0, 0}, sd{0, 0, 0};
    for (const auto& f : feats)
        for (int j = 0; j < 3; ++j) mu[j] += f[j];
    for (int j = 0; j < 3; ++j) mu[j] /= static_cast<double>(n);
    for (const auto& f : feats)
        for (int j = 0; j < 3; ++j) sd[j] += (f[j] - mu[j]) * (f[j] - mu[j]);
    for (int j = 0; j < 3; ++j) sd[j] = std::max(std::sqrt(sd[j] / n), 1e-9);
    for (auto& f : feats)
        for (int j = 0; j < 3; ++j) f[j] = (f[j] - mu[j]) / sd[j];

    std::array<double, 3> w{0, 0, 0};
    double b = 0.0;
    for (int it = 0; it < iterations; ++it) {
        std::array<double, 3> gw{0, 0, 0};
        double gb = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const double z = w[0] * feats[i][0] + w[1] * feats[i][1] + w[2] * feats[i][2] + b;
            const double p = 1.0 / (1.0 + std::exp(-z));
            const double err = p - labels[i];
            for (int j = 0; j < 3; ++j) gw[j] += err * feats[i][j];
            gb += err;
        }
        for (int j = 0; j < 3; ++j) w[j] -= learning_rate * gw[j] / n;
        b -= learning_rate * gb / n;
    }

    SegClassifier c;
    c.bias = b;
    for (int j = 0; j < 3; ++j) {
        c.weights[j] = w[j] / sd[j];
        c.bias -= w[j] * mu[j] / sd[j];
    }
    return c;
}

} // namespace fp
