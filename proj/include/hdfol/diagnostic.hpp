#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace hdfol {

// 1-based source position; line == 0 means "no source location".
struct SourceSpan {
  std::size_t line = 0;
  std::size_t column = 0;

  bool known() const { return line != 0; }
};

struct Diagnostic {
  std::string message;
  SourceSpan span;
};

using Diagnostics = std::vector<Diagnostic>;

std::string format_diagnostic(const Diagnostic& d, const std::string& origin = {});

// Thrown by parsers and by operations whose preconditions are violated by
// user-supplied input. Carries every diagnostic collected before giving up.
class Error : public std::runtime_error {
 public:
  explicit Error(Diagnostics diags);
  explicit Error(std::string message, SourceSpan span = {});

  const Diagnostics& diagnostics() const { return diags_; }

 private:
  Diagnostics diags_;
};

// Either a value or the diagnostics explaining why there is none.
template <typename T>
class Result {
 public:
  Result(T value) : state_(std::move(value)) {}
  Result(Diagnostics diags) : state_(std::move(diags)) {}

  bool ok() const { return state_.index() == 0; }
  explicit operator bool() const { return ok(); }

  const T& value() const& {
    if (!ok()) throw Error(std::get<1>(state_));
    return std::get<0>(state_);
  }
  T&& value() && {
    if (!ok()) throw Error(std::get<1>(state_));
    return std::get<0>(std::move(state_));
  }
  const Diagnostics& diagnostics() const {
    static const Diagnostics none;
    return ok() ? none : std::get<1>(state_);
  }

 private:
  std::variant<T, Diagnostics> state_;
};

}  // namespace hdfol
