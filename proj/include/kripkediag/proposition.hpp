#pragma once

#include <compare>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace kdiag::modal {

/// True when `name` is a valid atom identifier: ASCII letters, digits and
/// underscores, not starting with a digit.
inline bool is_identifier(std::string_view name) noexcept {
  if (name.empty()) return false;
  auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!alpha(name.front())) return false;
  for (char c : name)
    if (!alpha(c) && !digit(c)) return false;
  return true;
}

class InvalidPropositionError : public std::invalid_argument {
 public:
  explicit InvalidPropositionError(const std::string& name)
      : std::invalid_argument("invalid proposition name '" + name + "'") {}
};

/// An atomic proposition. Compared by name only.
class Proposition {
 public:
  explicit Proposition(std::string name) : name_(std::move(name)) {
    if (!is_identifier(name_)) throw InvalidPropositionError(name_);
  }

  const std::string& name() const noexcept { return name_; }

  friend bool operator==(const Proposition&, const Proposition&) = default;
  friend auto operator<=>(const Proposition&, const Proposition&) = default;

 private:
  std::string name_;
};

}  // namespace kdiag::modal
