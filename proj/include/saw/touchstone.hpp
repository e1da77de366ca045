#ifndef SAW_TOUCHSTONE_HPP
#define SAW_TOUCHSTONE_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "saw/network.hpp"

namespace saw {

enum class TouchstoneFormat { RI, MA, DB };

/// Parses a Touchstone v1 two-port file. Frequencies are converted to Hz and
/// all values to rectangular complex form regardless of the file's format.
/// Z-parameter files are inverted point-wise into Y-parameters on the fly.
/// Throws ParseError with a 1-based line number on malformed input. When
/// `warnings` is given, non-passive S points are reported there.
NetworkData parse_touchstone(std::istream& in,
                             std::vector<PassivityWarning>* warnings = nullptr);
NetworkData parse_touchstone(const std::string& text,
                             std::vector<PassivityWarning>* warnings = nullptr);

/// Emits Touchstone v1 text that parse_touchstone inverts. Throws Error for
/// an empty network. Single-point data serializes fine (parse flags it).
std::string serialize_touchstone(const NetworkData& net,
                                 TouchstoneFormat format = TouchstoneFormat::RI);

}  // namespace saw

#endif
