#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rtbias::cli {

struct CliInvocation {
  std::string subcommand;  ///< simulate | thin | estimate | mcmc | experiment
  std::string input;
  std::string output;
  std::string config;
  std::string gi;
  std::string method;
  std::string rates;
  std::string priors;
  std::string scenario = "A";
  std::string bayes = "spot";
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> window;
  std::optional<double> min_denominator;
  std::optional<double> prior_cap;
  std::size_t replicates = 100;
  unsigned threads = 0;
  bool figure1 = false;
  bool save_draws = false;
};

/// Text appended to --help: the exit status of every error kind.
std::string exit_code_table();

/// Parses argv-style arguments (without the program name). Returns nullopt
/// after printing help, and throws Error(InvalidArguments) on usage errors.
std::optional<CliInvocation> parse_invocation(const std::vector<std::string>& args,
                                              std::ostream& out);

/// Executes a parsed invocation. Numeric output goes to files; progress
/// messages go to `log`.
void dispatch(const CliInvocation& invocation, std::ostream& log);

/// parse_invocation + dispatch, mapping errors to exit codes with a one-line
/// diagnostic on `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rtbias::cli
