#include "fp/pipeline.hpp"

#include <fstream>
#include <sstream>
#include <string>
#include <utility>

#include "fp/errors.hpp"

namespace fp {

namespace {

// Runs one stage; any library error is rethrown as PipelineError carrying the
// stage name (already-named errors from nested stages pass through).
template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const PipelineError&) {
        throw;
    } catch (const Error& e) {
        throw PipelineError(name, e.what());
    }
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& context, const char* kind,
                            const std::string& value) {
    throw ParseError(context + ": expected " + kind + ", got '" + value + "'");
}

double parse_double(const std::string& value, const std::string& context) {
    size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &pos);
    } catch (const std::exception&) {
        bad_value(context, "a number", value);
    }
    if (pos != value.size()) bad_value(context, "a number", value);
    return v;
}

int parse_int(const std::string& value, const std::string& context) {
    size_t pos = 0;
    int v = 0;
    try {
        v = std::stoi(value, &pos);
    } catch (const std::exception&) {
        bad_value(context, "an integer", value);
    }
    if (pos != value.size()) bad_value(context, "an integer", value);
    return v;
}

} // namespace

void set_config_key(PipelineConfig& cfg, const std::string& key, const std::string& value,
                    const std::string& context) {
    if (key == "norm.m0") cfg.norm.m0 = parse_double(value, context);
    else if (key == "norm.v0") cfg.norm.v0 = parse_double(value, context);
    else if (key == "window.w") cfg.window_w = parse_int(value, context);
    else if (key == "orientation.bins") cfg.orientation_bins = parse_int(value, context);
    else if (key == "orientation.stride") cfg.orientation_stride = parse_int(value, context);
    else if (key == "gabor.period") cfg.gabor_period = parse_double(value, context);
    else if (key == "gabor.sigma") cfg.gabor_sigma = parse_double(value, context);
    else if (key == "gabor.ksize") cfg.gabor_ksize = parse_int(value, context);
    else if (key == "gabor.bins") cfg.gabor_bins = parse_int(value, context);
    else if (key == "seg.threshold") cfg.seg_threshold = parse_double(value, context);
    else if (key == "seg.stride") cfg.seg_stride = parse_int(value, context);
    else if (key == "extract.k") cfg.extract_k = parse_int(value, context);
    else if (key == "extract.threshold") cfg.extract_threshold = parse_double(value, context);
    else if (key == "extract.nms_radius") cfg.extract_nms_radius = parse_double(value, context);
    else if (key == "direction.bins") cfg.direction_bins = parse_int(value, context);
    else if (key == "direction.sigma") cfg.direction_sigma = parse_double(value, context);
    else if (key.rfind("loss.", 0) == 0) {
        auto it = cfg.loss_weights.find(key.substr(5));
        if (it == cfg.loss_weights.end()) throw ConfigError("unknown key '" + key + "'");
        it->second = parse_double(value, context);
    } else {
        throw ConfigError("unknown key '" + key + "'");
    }
}

void validate_config(const PipelineConfig& cfg) {
    if (!(cfg.norm.v0 > 0.0)) throw ConfigError("norm.v0 must be positive");
    if (cfg.window_w < 1) throw ConfigError("window.w must be positive");
    if (cfg.orientation_bins < 1) throw ConfigError("orientation.bins must be positive");
    if (cfg.orientation_stride < 1) throw ConfigError("orientation.stride must be positive");
    if (!(cfg.gabor_period > 0.0)) throw ConfigError("gabor.period must be positive");
    if (!(cfg.gabor_sigma > 0.0)) throw ConfigError("gabor.sigma must be positive");
    if (cfg.gabor_ksize < 1 || cfg.gabor_ksize % 2 == 0)
        throw ConfigError("gabor.ksize must be a positive odd integer");
    if (cfg.gabor_bins != cfg.orientation_bins)
        throw ConfigError("gabor.bins must equal orientation.bins");
    if (cfg.seg_stride < 1) throw ConfigError("seg.stride must be positive");
    if (cfg.extract_k < 1) throw ConfigError("extract.k must be positive");
    if (!(cfg.extract_nms_radius >= 0.0))
        throw ConfigError("extract.nms_radius must be non-negative");
    if (cfg.direction_bins < 1) throw ConfigError("direction.bins must be positive");
    if (!(cfg.direction_sigma > 0.0)) throw ConfigError("direction.sigma must be positive");
}

PipelineConfig parse_config(const std::string& text) {
    PipelineConfig cfg;
    std::istringstream in(text);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        const size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw ParseError("line " + std::to_string(lineno) + ": expected key=value, got '" +
                             s + "'");
        set_config_key(cfg, trim(s.substr(0, eq)), trim(s.substr(eq + 1)),
                       "line " + std::to_string(lineno));
    }
    validate_config(cfg);
    return cfg;
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

PipelineArtifacts run(const GrayImage& image, const PipelineConfig& cfg) {
    validate_config(cfg);
    if (image.width < 64 || image.height < 64)
        throw ShapeMismatch("input image must be at least 64x64, got " +
                            std::to_string(image.width) + "x" + std::to_string(image.height));

    PipelineArtifacts art;

    art.normalized = stage("normalize", [&] { return normalize(image, cfg.norm); });

    StructureTensor tensor;
    art.field = stage("orientation", [&] {
        auto [gx, gy] = sobel_gradients(art.normalized);
        tensor = structure_tensor(gx, gy, cfg.window_w);
        return orientation_field(tensor, cfg.orientation_stride);
    });

    stage("segmentation", [&] {
        const SegFeatures feats = seg_features(art.normalized, tensor, cfg.window_w);
        const SegmentationMap raw = seg_classify(feats, cfg.seg_classifier);
        art.seg = pool_scores(raw, cfg.seg_stride);
        const GrayImage cells = seg_binarize(art.seg, cfg.seg_threshold);
        art.seg_mask = GrayImage(image.width, image.height);
        for (int y = 0; y < image.height; ++y)
            for (int x = 0; x < image.width; ++x)
                art.seg_mask.at(x, y) = cells.at(x / cfg.seg_stride, y / cfg.seg_stride);
        return 0;
    });

    art.enhanced = stage("enhancement", [&] {
        const GaborBank bank =
            gabor_bank(1.0 / cfg.gabor_period, cfg.gabor_bins, cfg.gabor_sigma, cfg.gabor_ksize);
        return enhance_with_field(art.normalized, art.field, bank);
    });

    art.minutiae = stage("extraction", [&] {
        const TemplateBank bank = template_bank(cfg.extract_k, cfg.gabor_ksize, cfg.gabor_period);
        return extract(art.enhanced, bank, art.seg_mask, cfg.extract_threshold,
                       cfg.extract_nms_radius);
    });

    art.maps = stage("encode", [&] {
        const AngleCoding coding{cfg.direction_bins, 360, cfg.direction_sigma};
        return encode_minutiae_maps(art.minutiae, image.width, image.height, coding,
                                    &art.cell_collisions);
    });

    return art;
}

} // namespace fp
