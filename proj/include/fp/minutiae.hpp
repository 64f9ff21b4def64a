#pragma once

#include <string>
#include <vector>

namespace fp {

// A detected or planted feature point. direction_deg follows the ridge-flow
// convention used across this library: the angle, in [0, 360), of the bright
// ridge that terminates at this point.
struct Minutia {
    double x = 0.0;
    double y = 0.0;
    double direction_deg = 0.0;
    double score = 0.0;
};

using MinutiaeList = std::vector<Minutia>;

// Plain text, '#' comments allowed, one "x y direction_deg score" line per
// minutia, every value printed with two decimals. write -> read -> write is
// byte identical.
void write_minutiae(const std::string& path, const MinutiaeList& list);
MinutiaeList read_minutiae(const std::string& path);

} // namespace fp
