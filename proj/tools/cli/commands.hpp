#ifndef QDA_CLI_COMMANDS_HPP
#define QDA_CLI_COMMANDS_HPP

namespace qda::cli {

/// Exit codes shared by every subcommand.
enum ExitCode {
    exit_ok = 0,
    exit_verification_failure = 1,
    exit_config_error = 2,
    exit_numerical_failure = 3,
    exit_io_error = 4,
};

int run_cli(int argc, const char* const* argv);

} // namespace qda::cli

#endif
