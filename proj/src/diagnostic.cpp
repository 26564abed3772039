#include "hdfol/diagnostic.hpp"

namespace hdfol {

std::string format_diagnostic(const Diagnostic& d, const std::string& origin) {
  std::string out;
  if (!origin.empty()) out += origin + ":";
  if (d.span.known()) {
    out += std::to_string(d.span.line) + ":" + std::to_string(d.span.column) + ":";
  }
  if (!out.empty()) out += " ";
  out += "error: " + d.message;
  return out;
}

namespace {

std::string join_messages(const Diagnostics& diags) {
  std::string out;
  for (const auto& d : diags) {
    if (!out.empty()) out += "\n";
    out += format_diagnostic(d);
  }
  return out;
}

}  // namespace

Error::Error(Diagnostics diags) : std::runtime_error(join_messages(diags)), diags_(std::move(diags)) {}

Error::Error(std::string message, SourceSpan span)
    : Error(Diagnostics{Diagnostic{std::move(message), span}}) {}

}  // namespace hdfol
