#pragma once

#include <optional>
#include <string>
#include <vector>

#include "natt/surface.hpp"

namespace natt {

struct DriverOptions {
  CheckerOptions checker;
};

// An eq/modeleq declaration after both sides checked.
struct CheckedEq {
  bool model_only = false;  // true for modeleq
  Term lhs, rhs, type;
  bool kernel_equal = false;
  Span span;
};

struct FileReport {
  std::string filename;
  bool io_error = false;
  size_t decl_count = 0;
  std::vector<Diagnostic> diagnostics;
  Globals globals;
  std::vector<CheckedEq> equalities;

  bool ok() const { return !io_error && diagnostics.empty(); }
};

// Checks every declaration in order; an error stops the declaration it occurs
// in but later declarations are still processed.
FileReport check_text(const std::string& text, const std::string& filename,
                      const DriverOptions& opts);
FileReport check_file(const std::string& path, const DriverOptions& opts);

// Normal form of a checked definition's body, pretty-printed.
std::optional<std::string> normalize_definition(const FileReport& report, const Name& name,
                                                const DriverOptions& opts);

std::string render_text(const FileReport& report);
std::string render_json(const FileReport& report);

}  // namespace natt
