#pragma once

#include <exception>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"

namespace morphlex::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int { kOk = 0, kUsage = 1, kFormat = 2, kUnusable = 3 };

/// Bad flag combination or out-of-range value detected after parsing.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Command {
    CLI::App* app = nullptr;
    std::function<void()> run;
};

/// Adds every subcommand to `app`; the returned runners execute the parsed one.
std::vector<Command> register_commands(CLI::App& app);

/// Maps an exception escaping a command to its exit code.
int exit_code_for(const std::exception& e);

}  // namespace morphlex::cli
