#pragma once

#include <cstdint>
#include <string>

namespace udn::cli {

// Shortest decimal form that round-trips to the same double; "nan" marks the
// Monte Carlo columns of analytic-only runs. Deterministic, so repeated runs
// produce byte-identical files.
std::string format_double(double v);
std::string format_u64(uint64_t v);

// Write text to path via a sibling temp file and rename, so an interrupted
// run never leaves a partial file at the destination.
void write_file_atomic(const std::string& path, const std::string& text);

}  // namespace udn::cli
