// plsq: command line front end.  Subcommands are wired up in cli.hpp so the
// tests can drive them without spawning processes.

#include "plsq/cli.hpp"

int main(int argc, char** argv) { return plsq::cli_main(argc, argv); }
