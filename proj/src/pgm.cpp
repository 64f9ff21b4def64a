#include "fp/pgm.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fp {

namespace {

// Skips whitespace and '#' comments (which run to end of line).
void skip_separators(std::istream& in) {
    for (;;) {
        int c = in.peek();
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (c != EOF && std::isspace(c)) {
            in.get();
        } else {
            return;
        }
    }
}

int read_header_int(std::istream& in, const std::string& path, const char* what) {
    skip_separators(in);
    int v = 0;
    if (!(in >> v) || v < 0)
        throw ParseError(path + ": bad or missing " + what + " in PGM header");
    return v;
}

} // namespace

GrayImage read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");

    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    if (m0 != 'P' || (m1 != '2' && m1 != '5'))
        throw ParseError(path + ": not a P2/P5 PGM file");
    const bool binary = (m1 == '5');

    const int width = read_header_int(in, path, "width");
    const int height = read_header_int(in, path, "height");
    const int maxval = read_header_int(in, path, "maxval");
    if (width <= 0 || height <= 0)
        throw ParseError(path + ": non-positive image dimensions");
    if (maxval < 1 || maxval > 255)
        throw ParseError(path + ": unsupported maxval " + std::to_string(maxval) +
                         " (only 8-bit PGM is handled)");

    GrayImage img(width, height);
    const double scale = 255.0 / maxval;
    if (binary) {
        int c = in.get(); // single separator byte after maxval
        if (c == EOF) throw ParseError(path + ": truncated PGM header");
        std::vector<unsigned char> buf(img.size());
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        if (static_cast<size_t>(in.gcount()) != buf.size())
            throw ParseError(path + ": truncated P5 pixel data");
        for (size_t i = 0; i < buf.size(); ++i) img.pixels[i] = buf[i] * scale;
    } else {
        for (size_t i = 0; i < img.size(); ++i) {
            skip_separators(in);
            int v = 0;
            if (!(in >> v))
                throw ParseError(path + ": truncated P2 pixel data at sample " + std::to_string(i));
            if (v < 0 || v > maxval)
                throw ParseError(path + ": sample " + std::to_string(v) + " outside [0, maxval]");
            img.pixels[i] = v * scale;
        }
    }
    return img;
}

void write_pgm(const std::string& path, const GrayImage& image, PgmFormat format) {
    if (image.width <= 0 || image.height <= 0 || image.size() != static_cast<size_t>(image.width) * image.height)
        throw ShapeMismatch("write_pgm: image has invalid shape");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");

    auto quantize = [](double v) -> int {
        if (v < 0.0) v = 0.0;
        if (v > 255.0) v = 255.0;
        return static_cast<int>(std::llround(v));
    };

    if (format == PgmFormat::P5) {
        out << "P5\n" << image.width << " " << image.height << "\n255\n";
        std::vector<unsigned char> buf(image.size());
        for (size_t i = 0; i < image.size(); ++i)
            buf[i] = static_cast<unsigned char>(quantize(image.pixels[i]));
        out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    } else {
        out << "P2\n" << image.width << " " << image.height << "\n255\n";
        for (int y = 0; y < image.height; ++y) {
            for (int x = 0; x < image.width; ++x) {
                out << quantize(image.at(x, y));
                out << (x + 1 == image.width ? '\n' : ' ');
            }
        }
    }
    if (!out) throw IoError("failed writing '" + path + "'");
}

} // namespace fp
