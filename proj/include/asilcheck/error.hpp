#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace asilcheck {

enum class ErrorKind {
  syntax,
  duplicate_id,
  unknown_reference,
  range_violation,
  cycle_detected,
  constraint_violation,
  missing_asil_source,
  missing_fault_data,
  non_positive_hours,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::syntax: return "SyntaxError";
    case ErrorKind::duplicate_id: return "DuplicateId";
    case ErrorKind::unknown_reference: return "UnknownReference";
    case ErrorKind::range_violation: return "RangeViolation";
    case ErrorKind::cycle_detected: return "CycleDetected";
    case ErrorKind::constraint_violation: return "ConstraintViolation";
    case ErrorKind::missing_asil_source: return "MissingAsilSource";
    case ErrorKind::missing_fault_data: return "MissingFaultData";
    case ErrorKind::non_positive_hours: return "NonPositiveHours";
  }
  return "Error";
}

/// Every failure raised by the library. `subject` is the offending id (or
/// value) and `location` a path into the model document, when known.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string subject, std::string location, const std::string& message)
      : std::runtime_error(compose(kind, subject, location, message)),
        kind_(kind),
        subject_(std::move(subject)),
        location_(std::move(location)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& subject() const noexcept { return subject_; }
  const std::string& location() const noexcept { return location_; }

 private:
  static std::string compose(ErrorKind kind, const std::string& subject, const std::string& location,
                             const std::string& message) {
    std::string out{to_string(kind)};
    if (!location.empty()) {
      out += " at " + location;
    }
    if (!subject.empty()) {
      out += " [" + subject + "]";
    }
    out += ": " + message;
    return out;
  }

  ErrorKind kind_;
  std::string subject_;
  std::string location_;
};

}  // namespace asilcheck
