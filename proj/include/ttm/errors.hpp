// Error taxonomy shared by the library and the CLI.
//
// Every library error derives from ttm::Error and carries a category that the
// CLI maps onto its stable exit-code contract:
//   config  -> exit 1   (usage / configuration problems)
//   data    -> exit 2   (unreadable, malformed, or degenerate input data)
//   numeric -> exit 3   (numerical failures: infeasible statistics, domain
//                        violations, non-convergent quadrature, empty topics)
#pragma once

#include <stdexcept>
#include <string>

namespace ttm {

enum class ErrorCategory { config = 1, data = 2, numeric = 3 };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

// -- config ------------------------------------------------------------------
struct ConfigError : Error {
  explicit ConfigError(const std::string& m) : Error(ErrorCategory::config, m) {}
};

// -- data --------------------------------------------------------------------
struct ParseError : Error {
  explicit ParseError(const std::string& m) : Error(ErrorCategory::data, m) {}
};
struct VocabularyEmpty : Error {
  explicit VocabularyEmpty(const std::string& m) : Error(ErrorCategory::data, m) {}
};
struct InvalidTimestamp : Error {
  explicit InvalidTimestamp(const std::string& m) : Error(ErrorCategory::data, m) {}
};
struct SplitTooSmall : Error {
  explicit SplitTooSmall(const std::string& m) : Error(ErrorCategory::data, m) {}
};

// -- numeric -----------------------------------------------------------------
struct DomainError : Error {
  explicit DomainError(const std::string& m) : Error(ErrorCategory::numeric, m) {}
};
struct InfeasibleStats : Error {
  explicit InfeasibleStats(const std::string& m) : Error(ErrorCategory::numeric, m) {}
};
struct QuadratureFailure : Error {
  explicit QuadratureFailure(const std::string& m) : Error(ErrorCategory::numeric, m) {}
};
struct EmptyTopic : Error {
  explicit EmptyTopic(const std::string& m) : Error(ErrorCategory::numeric, m) {}
};

}  // namespace ttm
