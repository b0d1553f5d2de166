#pragma once

#include "web4/classify.hpp"
#include "web4/coframe.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace web4 {

/// A web spec file after parsing: the web plus its sampling grid.
struct SpecFile {
    WebSpec spec;
    Grid grid;
    bool backend_given = false;
    /// Source text of each formula, for reports.
    std::string source_u[3];
    std::string source_fourth;
};

/// Reads the flat key = value format:
///
///   # comment
///   u1 = "x"
///   u2 = "y"
///   u3 = "x + y"
///   a  = "2 + x"            # or u4 = "..."
///   domain = [0, 1, 0, 1]
///   grid = [9, 9]
///   order = 6
///   backend = rational      # default: rational iff every formula is rational
///   epsilon = 1e-9
///
/// Throws WebError(invalid_spec) naming the line; formula errors keep the
/// parser's byte offset in the message.
SpecFile parse_spec_file(std::string_view text);

SpecFile load_spec_file(const std::filesystem::path& path);

}  // namespace web4
