#pragma once

#include <string>

#include "qvlab/path.hpp"

namespace qvlab {

// Columnar path file: a header row (horizon, n_steps, jump_count), the
// continuous samples one per line, then the (index, size) jump pairs.
// Doubles are printed with 17 significant digits, so a round trip is exact.
std::string serialize_path(const CadlagPath& path);
void write_path_file(const std::string& file, const CadlagPath& path);
CadlagPath read_path_file(const std::string& file);
CadlagPath parse_path(const std::string& text);

}  // namespace qvlab
