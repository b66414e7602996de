#include "atlas/errors.hpp"

namespace atlas {

namespace {

std::string join_lines(const std::string& head, const std::vector<std::string>& items) {
  std::string out = head;
  for (const auto& item : items) {
    out += "\n  - ";
    out += item;
  }
  return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : Error(join_lines("validation failed:", violations)),
      violations_(std::move(violations)) {}

ReconciliationError::ReconciliationError(std::string what,
                                         std::vector<std::string> only_left,
                                         std::vector<std::string> only_right)
    : Error(join_lines(join_lines(what + "\nonly in first:", only_left) +
                           "\nonly in second:",
                       only_right)),
      only_left_(std::move(only_left)),
      only_right_(std::move(only_right)) {}

}  // namespace atlas
