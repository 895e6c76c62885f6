#include "levywave/jumps.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace levywave {

std::string band_label(JumpBand b) {
    switch (b) {
        case JumpBand::Large: return "large";
        case JumpBand::Overflow: return "overflow";
        case JumpBand::Small: return "small";
    }
    return "?";
}

void JumpSet::sort_by_time() {
    std::stable_sort(atoms.begin(), atoms.end(),
                     [](const JumpAtom& a, const JumpAtom& b) { return a.t < b.t; });
}

void JumpSet::write_csv(std::ostream& os) const {
    os << (window.dim == 1 ? "t,x1,z,band\n" : "t,x1,x2,z,band\n");
    char buf[128];
    const std::string label = band_label(band);
    for (const auto& a : atoms) {
        if (window.dim == 1)
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,", a.t, a.x[0], a.z);
        else
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,", a.t, a.x[0], a.x[1], a.z);
        os << buf << label << "\n";
    }
}

JumpSet JumpSet::read_csv(std::istream& is, const SimWindow& window, std::uint64_t seed) {
    JumpSet js;
    js.window = window;
    js.seed = seed;
    std::string line;
    std::getline(is, line);  // header
    bool first = true;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        require(fields.size() == (window.dim == 1 ? 4u : 5u), "bad jump CSV row: " + line);
        JumpAtom a;
        a.t = std::stod(fields[0]);
        a.x[0] = std::stod(fields[1]);
        if (window.dim == 2) a.x[1] = std::stod(fields[2]);
        a.z = std::stod(fields[window.dim == 1 ? 2 : 3]);
        const std::string& label = fields.back();
        if (first) {
            js.band = label == "large" ? JumpBand::Large
                      : label == "overflow" ? JumpBand::Overflow
                                            : JumpBand::Small;
            first = false;
        }
        js.atoms.push_back(a);
    }
    return js;
}

} // namespace levywave
