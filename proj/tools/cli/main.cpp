#include "commands.hpp"

int main(int argc, char** argv) { return qda::cli::run_cli(argc, argv); }
