#pragma once

// Text formats for returns and measurement streams.
//
// Returns: one round per line, d comma-separated nonnegative numbers, with an
// optional header line "a1,...,ad". Rows are normalized on load.
// Measurements: one round per line, the d^2 entries of the effect E in
// row-major order as interleaved (re, im) pairs, then the outcome b.

#include <iosfwd>
#include <string>
#include <vector>

#include "bisons/geometry.hpp"
#include "bisons/hermitian.hpp"

namespace bisons {

/// Throws Errc::kParse (with the line number) on malformed input and
/// Errc::kInvalidReturns (with the row index) on an invalid row.
std::vector<ReturnsVec> parse_returns(std::istream& in, const std::string& source = "<stream>");
std::vector<ReturnsVec> load_returns(const std::string& path);

/// Writes the header and 17 significant digits per value.
void write_returns(std::ostream& out, const std::vector<ReturnsVec>& returns);
void save_returns(const std::string& path, const std::vector<ReturnsVec>& returns);

std::vector<MeasurementEvent> parse_measurements(std::istream& in,
                                                 const std::string& source = "<stream>");
std::vector<MeasurementEvent> load_measurements(const std::string& path);

void write_measurements(std::ostream& out, const std::vector<MeasurementEvent>& events);
void save_measurements(const std::string& path, const std::vector<MeasurementEvent>& events);

/// Shortest round-tripping text of a double ("%.17g").
std::string format_double(double v);

}  // namespace bisons
