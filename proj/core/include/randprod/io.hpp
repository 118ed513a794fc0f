#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "randprod/simulate.hpp"

// CSV emission. Formatting uses %.17g so values round-trip exactly and
// re-runs with equal seeds produce byte-identical files.

namespace randprod {

// Versioned column sets (schema v1).
inline constexpr const char* kSampleCsvHeader = "replicate,value";
inline constexpr const char* kRateTableCsvHeader = "beta,I,alpha";
inline constexpr const char* kTailCheckCsvHeader =
    "n,beta,alpha,asymptotic,chernoff,is_mean,is_stderr,exact";
inline constexpr const char* kLawCdfCsvHeader = "x,F";
inline constexpr const char* kPhaseDiagramCsvHeader = "c,regime,alpha,limit,simulated,gap";
inline constexpr const char* kConvergenceCsvHeader = "n,N,mean,sd,ks,limit";

std::string format_double(double v);

void write_sample_csv(std::ostream& os, const SampleSet& set);

// Generic writer: header line, then one line per row of pre-formatted cells.
void write_csv(std::ostream& os, const std::string& header,
               const std::vector<std::vector<std::string>>& rows);

}  // namespace randprod
