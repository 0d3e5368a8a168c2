#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "ppbu/radial_mesh.hpp"

namespace ppbu {

/// A named nonzero nodal profile.
struct Profile {
    std::string name;
    std::vector<double> values;
};

using ProfileDictionary = std::vector<Profile>;

/// Smooth radial profiles vanishing at r = 1: polynomial caps, a cosine mode,
/// Gaussian bumps of decreasing width and two off-centre rings.
inline ProfileDictionary standard_dictionary(const RadialMesh& mesh) {
    ProfileDictionary d;
    for (int k = 1; k <= 4; ++k)
        d.push_back({"cap" + std::to_string(k), mesh.sample([k](double r) { return std::pow(1.0 - r * r, k); })});
    d.push_back({"cosine", mesh.sample([](double r) { return std::cos(0.5 * std::numbers::pi * r); })});
    for (double w : {0.5, 0.3, 0.2, 0.1, 0.05}) {
        const double edge = std::exp(-1.0 / (w * w));
        d.push_back({"gauss" + std::to_string(w),
                     mesh.sample([w, edge](double r) { return std::exp(-r * r / (w * w)) - edge; })});
    }
    for (double c : {0.3, 0.6}) {
        d.push_back({"ring" + std::to_string(c),
                     mesh.sample([c](double r) { return (1.0 - r * r) * std::exp(-(r - c) * (r - c) / 0.02); })});
    }
    return d;
}

/// The single profile 1 - r^2.
inline ProfileDictionary parabolic_dictionary(const RadialMesh& mesh) {
    return {{"cap1", mesh.sample([](double r) { return 1.0 - r * r; })}};
}

}  // namespace ppbu
