#include "fp/minutiae.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "fp/errors.hpp"

namespace fp {

void write_minutiae(const std::string& path, const MinutiaeList& list) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "# x y direction_deg score\n";
    char buf[128];
    for (const Minutia& m : list) {
        if (!(m.direction_deg >= 0.0) || m.direction_deg >= 360.0)
            throw AngleOutOfRange("write_minutiae: direction " + std::to_string(m.direction_deg) +
                                  " outside [0, 360)");
        std::snprintf(buf, sizeof buf, "%.2f %.2f %.2f %.2f\n", m.x, m.y, m.direction_deg, m.score);
        out << buf;
    }
    if (!out) throw IoError("failed writing '" + path + "'");
}

MinutiaeList read_minutiae(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    MinutiaeList list;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;
        std::istringstream row(line);
        Minutia m;
        if (!(row >> m.x >> m.y >> m.direction_deg >> m.score))
            throw ParseError(path + ":" + std::to_string(lineno) +
                             ": expected 'x y direction_deg score'");
        std::string extra;
        if (row >> extra)
            throw ParseError(path + ":" + std::to_string(lineno) + ": trailing content '" + extra + "'");
        if (!(m.direction_deg >= 0.0) || m.direction_deg >= 360.0)
            throw ParseError(path + ":" + std::to_string(lineno) + ": direction outside [0, 360)");
        list.push_back(m);
    }
    return list;
}

} // namespace fp
