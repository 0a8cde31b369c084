#include "trigof/io.hpp"

#include "trigof/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>

namespace trigof::io {

Sample read_sample(std::istream& in) {
    Sample out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        auto e = line.find_last_not_of(" \t\r,");
        if (e == std::string::npos || e < b) throw DataError("unparseable line: '" + line + "'", lineno);
        const char* first = line.data() + b;
        const char* last = line.data() + e + 1;
        if (*first == '+') ++first;
        double v = 0.0;
        auto [p, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || p != last || !std::isfinite(v))
            throw DataError("line " + std::to_string(lineno) + ": not a finite number: '" + line + "'", lineno);
        out.push_back(v);
    }
    if (out.empty()) throw DataError("input contains no observations");
    return out;
}

Sample load_sample(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    return read_sample(in);
}

}  // namespace trigof::io
