#include "hlab/measure.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hlab {

double AtomicMeasure::total_mass() const { return pairwise_sum(weights); }

std::vector<std::array<int, 4>> moment_exponents(int degree) {
    std::vector<std::array<int, 4>> out;
    for (int tot = 1; tot <= degree; ++tot)
        for (int a = tot; a >= 0; --a)
            for (int b = tot - a; b >= 0; --b)
                for (int c = tot - a - b; c >= 0; --c)
                    out.push_back({a, b, c, tot - a - b - c});
    return out;
}

std::vector<double> AtomicMeasure::moments(int degree) const {
    const auto exps = moment_exponents(degree);
    const double mass = total_mass();
    std::vector<double> out;
    out.reserve(exps.size());
    std::vector<double> terms(points.size());
    for (const auto& e : exps) {
        for (std::size_t i = 0; i < points.size(); ++i) {
            const double c[4] = {points[i].z.real(), points[i].z.imag(),
                                 points[i].w.real(), points[i].w.imag()};
            double m = weights[i];
            for (int a = 0; a < 4; ++a)
                for (int r = 0; r < e[static_cast<std::size_t>(a)]; ++r)
                    m *= c[a];
            terms[i] = m;
        }
        out.push_back(mass > 0 ? pairwise_sum(terms) / mass : 0.0);
    }
    return out;
}

Pt2 AtomicMeasure::mean() const {
    const double mass = total_mass();
    std::vector<double> t(points.size());
    auto comp = [&](auto get) {
        for (std::size_t i = 0; i < points.size(); ++i)
            t[i] = weights[i] * get(points[i]);
        return mass > 0 ? pairwise_sum(t) / mass : 0.0;
    };
    return Pt2{cplx(comp([](Pt2 p) { return p.z.real(); }),
                    comp([](Pt2 p) { return p.z.imag(); })),
               cplx(comp([](Pt2 p) { return p.w.real(); }),
                    comp([](Pt2 p) { return p.w.imag(); }))};
}

void AtomicMeasure::sort_points() {
    std::vector<std::size_t> idx(points.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    auto key = [&](std::size_t i) {
        return std::array<double, 5>{points[i].z.real(), points[i].z.imag(),
                                     points[i].w.real(), points[i].w.imag(),
                                     weights[i]};
    };
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
    AtomicMeasure out;
    out.points.reserve(points.size());
    out.weights.reserve(points.size());
    for (std::size_t i : idx) out.add(points[i], weights[i]);
    *this = std::move(out);
}

void AtomicMeasure::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open cloud file for write: " + path);
    out << "re_z,im_z,re_w,im_w,weight\n";
    char buf[160];
    for (std::size_t i = 0; i < points.size(); ++i) {
        std::snprintf(buf, sizeof buf,
                      "%.17g,%.17g,%.17g,%.17g,%.17g\n", points[i].z.real(),
                      points[i].z.imag(), points[i].w.real(),
                      points[i].w.imag(), weights[i]);
        out << buf;
    }
}

AtomicMeasure AtomicMeasure::read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open cloud file: " + path);
    AtomicMeasure m;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        double v[5];
        char comma;
        ss >> v[0] >> comma >> v[1] >> comma >> v[2] >> comma >> v[3] >>
            comma >> v[4];
        if (!ss) throw std::runtime_error("bad cloud row: " + line);
        m.add(Pt2{cplx(v[0], v[1]), cplx(v[2], v[3])}, v[4]);
    }
    return m;
}

double moment_distance(const std::vector<double>& a,
                       const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i)
        d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

}  // namespace hlab
