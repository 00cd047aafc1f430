#include "natt/driver.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace natt {

namespace {

void record(FileReport& report, TypeError& e, const Span& fallback) {
  Diagnostic d = e.diag();
  if (!d.span) d.span = fallback;
  if (d.span->file.empty()) d.span->file = report.filename;
  report.diagnostics.push_back(std::move(d));
}

}  // namespace

FileReport check_text(const std::string& text, const std::string& filename,
                      const DriverOptions& opts) {
  FileReport report;
  report.filename = filename;

  SourceFile file;
  try {
    file = parse(text, filename);
  } catch (TypeError& e) {
    record(report, e, Span{filename, 1, 1});
    return report;
  }

  Checker checker(report.globals, opts.checker);
  Elaborator elab(checker);
  RawContext empty;

  for (const Decl& decl : file.decls) {
    ++report.decl_count;
    try {
      switch (decl.kind) {
        case Decl::Kind::Def: {
          Term type = elab.check_is_type(empty, decl.type);
          Term body = elab.check_term(empty, decl.body, type);
          report.globals.add({decl.name, type, body});
          break;
        }
        case Decl::Kind::Postulate: {
          Term type = elab.check_is_type(empty, decl.type);
          report.globals.add({decl.name, type, std::nullopt});
          break;
        }
        case Decl::Kind::Check: {
          Term type = elab.check_is_type(empty, decl.type);
          elab.check_term(empty, decl.body, type);
          break;
        }
        case Decl::Kind::Eq:
        case Decl::Kind::ModelEq: {
          Term type = elab.check_is_type(empty, decl.type);
          Term lhs = elab.check_term(empty, decl.body, type);
          Term rhs = elab.check_term(empty, decl.rhs, type);
          CheckedEq eq;
          eq.model_only = decl.kind == Decl::Kind::ModelEq;
          eq.lhs = lhs;
          eq.rhs = rhs;
          eq.type = type;
          eq.span = decl.span;
          eq.kernel_equal = checker.convert(empty, lhs, rhs, type);
          if (!eq.model_only && !eq.kernel_equal) {
            Diagnostic d{"conversion", "eq declaration: sides are not definitionally equal"};
            d.expected = lhs;
            d.actual = rhs;
            d.span = decl.span;
            report.diagnostics.push_back(std::move(d));
          }
          report.equalities.push_back(std::move(eq));
          break;
        }
      }
    } catch (TypeError& e) {
      record(report, e, decl.span);
    } catch (const FuelExhausted&) {
      Diagnostic d{"fuel", "conversion fuel exhausted"};
      d.span = decl.span;
      report.diagnostics.push_back(std::move(d));
    }
  }
  return report;
}

FileReport check_file(const std::string& path, const DriverOptions& opts) {
  std::ifstream in(path);
  if (!in) {
    FileReport report;
    report.filename = path;
    report.io_error = true;
    return report;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return check_text(buf.str(), path, opts);
}

std::optional<std::string> normalize_definition(const FileReport& report, const Name& name,
                                                const DriverOptions& opts) {
  const GlobalDecl* g = report.globals.lookup(name);
  if (!g || !g->body) return std::nullopt;
  Checker checker(report.globals, opts.checker);
  return pretty(checker.normalize(*g->body));
}

std::string render_text(const FileReport& report) {
  std::ostringstream os;
  if (report.io_error) {
    os << report.filename << ": cannot read file\n";
    return os.str();
  }
  for (const Diagnostic& d : report.diagnostics) {
    if (d.span)
      os << d.span->file << ":" << d.span->line << ":" << d.span->col << ": ";
    else
      os << report.filename << ": ";
    os << d.rule << ": " << d.message;
    if (d.expected) os << "\n  expected: " << pretty(*d.expected);
    if (d.actual) os << "\n  actual:   " << pretty(*d.actual);
    os << "\n";
  }
  if (report.diagnostics.empty())
    os << "ok: " << report.filename << " (" << report.decl_count << " declarations)\n";
  else
    os << report.filename << ": " << report.diagnostics.size() << " error(s)\n";
  return os.str();
}

std::string render_json(const FileReport& report) {
  nlohmann::json out = nlohmann::json::array();
  for (const Diagnostic& d : report.diagnostics) {
    nlohmann::json o;
    o["file"] = d.span ? d.span->file : report.filename;
    o["line"] = d.span ? d.span->line : 0;
    o["col"] = d.span ? d.span->col : 0;
    o["rule"] = d.rule;
    o["message"] = d.message;
    out.push_back(std::move(o));
  }
  return out.dump(2) + "\n";
}

}  // namespace natt
