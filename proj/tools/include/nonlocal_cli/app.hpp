#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "nonlocal/lemmas.hpp"
#include "nonlocal/rigidity.hpp"
#include "nonlocal_cli/config.hpp"

namespace nonlocal::cli {

enum class Command { Eval, Lambda, Barrier, Lemma, Replay, OneSided, Flow, Classify };

std::string commandName(Command command);

struct Invocation {
  Command command = Command::Eval;
  Json config = Json::object();
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<LemmaId> lemma;
  std::optional<Side> side;
};

struct Outcome {
  /// schemaVersion, version, command, resolved config, result, pass.
  Json report;
  /// Empty when the command has no tabular output.
  std::string csv;
  bool pass = false;
};

/// Runs one command. Throws ConfigError for invalid configs and library
/// DomainErrors raised while setting up; other library errors are caught
/// and reported as a failed check.
Outcome execute(const Invocation& invocation);

/// Exit status 0 when every check passes, 1 when a check fails (report still
/// written) and 2 for invalid input.
int runCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nonlocal::cli
