#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace asilcheck::cli {

enum ExitCode : int {
  kClean = 0,        // no error findings
  kFindings = 1,     // at least one error finding (or warning with --strict)
  kInputError = 2,   // model failed to parse, or bad command line
  kInternalError = 3,
};

/// Entry point of the asilcheck tool; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// `schema` subcommand output: schema versions plus the rule catalog.
std::string schema_document();

}  // namespace asilcheck::cli
