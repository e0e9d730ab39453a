// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <unordered_map>

#include <json.hpp>

namespace detgeom::cli {

/// A parsed JSON document plus the source line of every value, keyed by
/// JSON pointer. Lines are 1-based; object members map to the line of
/// their key.
struct LocatedJson {
  nlohmann::json doc;
  std::string source;  // file name used in diagnostics
  std::unordered_map<std::string, int> lines;

  /// Line of `pointer`, or of its nearest recorded ancestor.
  int line_of(const std::string& pointer) const;

  /// "source:line: pointer: message"
  std::string diagnostic(const std::string& pointer,
                         const std::string& message) const;
};

/// Parses `text`; throws InputError "source:line:column: ..." on malformed
/// JSON.
LocatedJson parse_located(const std::string& text, const std::string& source);

/// Reads a whole file; throws InputError if it cannot be opened.
std::string read_file(const std::string& path);

}  // namespace detgeom::cli
