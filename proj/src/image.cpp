#include "lndf/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace lndf {

void write_ppm(const std::string& path, const Image& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.rgb.data()),
              static_cast<std::streamsize>(img.rgb.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

// 11 control points of the matplotlib viridis map, linearly interpolated.
constexpr float kViridis[11][3] = {
    {0.267004f, 0.004874f, 0.329415f}, {0.282623f, 0.140926f, 0.457517f},
    {0.253935f, 0.265254f, 0.529983f}, {0.206756f, 0.371758f, 0.553117f},
    {0.163625f, 0.471133f, 0.558148f}, {0.127568f, 0.566949f, 0.550556f},
    {0.134692f, 0.658636f, 0.517649f}, {0.266941f, 0.748751f, 0.440573f},
    {0.477504f, 0.821444f, 0.318195f}, {0.741388f, 0.873449f, 0.149561f},
    {0.993248f, 0.906157f, 0.143936f},
};

} // namespace

std::array<uint8_t, 3> colormap_viridis(double t) {
    t = std::clamp(t, 0.0, 1.0);
    double u = t * 10.0;
    int i = std::min(static_cast<int>(u), 9);
    double f = u - i;
    std::array<uint8_t, 3> out;
    for (int c = 0; c < 3; ++c) {
        double v = kViridis[i][c] * (1.0 - f) + kViridis[i + 1][c] * f;
        out[c] = static_cast<uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
    }
    return out;
}

} // namespace lndf
