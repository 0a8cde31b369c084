#pragma once

#include "trigof/families.hpp"

#include <iosfwd>
#include <string>

namespace trigof::io {

// One numeric value per line. Blank lines and text after '#' are ignored;
// a trailing comma is accepted. Throws DataError naming the line on
// anything else, and on an empty sample.
Sample read_sample(std::istream& in);
Sample load_sample(const std::string& path);

}  // namespace trigof::io
