#include "hlab/grid.hpp"

#include <cstring>
#include <fstream>

namespace hlab {

double Grid4::interpolate(Pt2 x) const {
    const double t0 = ax_[0].frac_index(x.z.real());
    const double t1 = ax_[1].frac_index(x.z.imag());
    const double t2 = ax_[2].frac_index(x.w.real());
    const double t3 = ax_[3].frac_index(x.w.imag());
    const auto cell = [](double t, int n, int& i, double& f) {
        i = static_cast<int>(t);
        if (i > n - 2) i = n - 2;
        if (i < 0) i = 0;
        f = t - i;
    };
    int i0, i1, i2, i3;
    double f0, f1, f2, f3;
    cell(t0, ax_[0].n, i0, f0);
    cell(t1, ax_[1].n, i1, f1);
    cell(t2, ax_[2].n, i2, f2);
    cell(t3, ax_[3].n, i3, f3);
    double acc = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d) {
                    const double w = (a ? f0 : 1 - f0) * (b ? f1 : 1 - f1) *
                                     (c ? f2 : 1 - f2) * (d ? f3 : 1 - f3);
                    if (w != 0.0)
                        acc += w * at(i0 + a, i1 + b, i2 + c, i3 + d);
                }
    return acc;
}

double Grid2::interpolate(cplx z) const {
    const double t0 = re_.frac_index(z.real());
    const double t1 = im_.frac_index(z.imag());
    int i = static_cast<int>(t0), j = static_cast<int>(t1);
    if (i > re_.n - 2) i = re_.n - 2;
    if (j > im_.n - 2) j = im_.n - 2;
    if (i < 0) i = 0;
    if (j < 0) j = 0;
    const double f = t0 - i, g = t1 - j;
    return (1 - f) * (1 - g) * at(i, j) + f * (1 - g) * at(i + 1, j) +
           (1 - f) * g * at(i, j + 1) + f * g * at(i + 1, j + 1);
}

namespace {
constexpr char kMagic[8] = {'H', 'L', 'G', 'R', 'I', 'D', '4', '\0'};

struct Header {  // 64 bytes
    char magic[8];
    std::uint32_t version;
    std::uint32_t res[4];
    std::uint8_t orientation;
    std::uint8_t pad[3];
    double m_radius;
    double n_radius;
    double floor_value;
    char reserved[8];
};
static_assert(sizeof(Header) == 64, "grid header must be 64 bytes");
}  // namespace

void write_grid_file(const std::string& path, const Grid4& g,
                     std::uint8_t orientation, double floor_value) {
    Header h{};
    std::memcpy(h.magic, kMagic, 8);
    h.version = 1;
    for (int a = 0; a < 4; ++a)
        h.res[a] = static_cast<std::uint32_t>(g.axis(a).n);
    h.orientation = orientation;
    h.m_radius = g.axis(0).hi;
    h.n_radius = g.axis(2).hi;
    h.floor_value = floor_value;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open grid file for write: " + path);
    out.write(reinterpret_cast<const char*>(&h), sizeof h);
    out.write(reinterpret_cast<const char*>(g.values().data()),
              static_cast<std::streamsize>(g.size() * sizeof(double)));
    if (!out) throw std::runtime_error("grid file write failed: " + path);
}

Grid4 read_grid_file(const std::string& path, std::uint8_t* orientation,
                     double* floor_value) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open grid file: " + path);
    Header h{};
    in.read(reinterpret_cast<char*>(&h), sizeof h);
    if (!in || std::memcmp(h.magic, kMagic, 8) != 0 || h.version != 1)
        throw std::runtime_error("bad grid file header: " + path);
    std::array<Axis, 4> axes = {
        Axis{static_cast<int>(h.res[0]), -h.m_radius, h.m_radius},
        Axis{static_cast<int>(h.res[1]), -h.m_radius, h.m_radius},
        Axis{static_cast<int>(h.res[2]), -h.n_radius, h.n_radius},
        Axis{static_cast<int>(h.res[3]), -h.n_radius, h.n_radius}};
    Grid4 g(axes);
    in.read(reinterpret_cast<char*>(g.values().data()),
            static_cast<std::streamsize>(g.size() * sizeof(double)));
    if (!in) throw std::runtime_error("grid file truncated: " + path);
    if (orientation) *orientation = h.orientation;
    if (floor_value) *floor_value = h.floor_value;
    return g;
}

}  // namespace hlab
