#include "qvlab/pathio.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qvlab/csv.hpp"

namespace qvlab {

std::string serialize_path(const CadlagPath& path) {
  std::string out = "horizon,n_steps,jump_count\n";
  out += CsvWriter::format(path.grid().horizon);
  out += ',';
  out += std::to_string(path.grid().n_steps);
  out += ',';
  out += std::to_string(path.jumps().size());
  out += '\n';
  for (double v : path.cont()) {
    out += CsvWriter::format(v);
    out += '\n';
  }
  for (const Jump& j : path.jumps()) {
    out += std::to_string(j.index);
    out += ',';
    out += CsvWriter::format(j.size);
    out += '\n';
  }
  return out;
}

void write_path_file(const std::string& file, const CadlagPath& path) {
  write_text_file(file, serialize_path(path));
}

CadlagPath parse_path(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "horizon,n_steps,jump_count")
    throw std::invalid_argument("path file: bad header row");
  if (!std::getline(in, line))
    throw std::invalid_argument("path file: missing dimensions row");
  double horizon = 0.0;
  std::size_t n_steps = 0, jump_count = 0;
  {
    std::istringstream row(line);
    char c1 = 0, c2 = 0;
    if (!(row >> horizon >> c1 >> n_steps >> c2 >> jump_count) || c1 != ',' ||
        c2 != ',')
      throw std::invalid_argument("path file: bad dimensions row");
  }
  const TimeGrid grid{horizon, n_steps};
  std::vector<double> cont(n_steps + 1);
  for (std::size_t i = 0; i <= n_steps; ++i) {
    if (!std::getline(in, line))
      throw std::invalid_argument("path file: truncated continuous samples");
    cont[i] = std::stod(line);
  }
  std::vector<Jump> jumps(jump_count);
  for (std::size_t k = 0; k < jump_count; ++k) {
    if (!std::getline(in, line))
      throw std::invalid_argument("path file: truncated jump list");
    std::istringstream row(line);
    char c = 0;
    if (!(row >> jumps[k].index >> c >> jumps[k].size) || c != ',')
      throw std::invalid_argument("path file: bad jump row");
  }
  return CadlagPath(grid, std::move(cont), std::move(jumps));
}

CadlagPath read_path_file(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open path file: " + file);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_path(buf.str());
}

}  // namespace qvlab
