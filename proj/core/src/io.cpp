#include "randprod/io.hpp"

#include <cstdio>

namespace randprod {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_sample_csv(std::ostream& os, const SampleSet& set) {
  os << kSampleCsvHeader << '\n';
  for (std::size_t i = 0; i < set.values.size(); ++i) {
    os << i << ',' << format_double(set.values[i]) << '\n';
  }
}

void write_csv(std::ostream& os, const std::string& header,
               const std::vector<std::vector<std::string>>& rows) {
  os << header << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) os << ',';
      os << row[i];
    }
    os << '\n';
  }
}

}  // namespace randprod
