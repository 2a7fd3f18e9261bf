#include "goldlab/commands.hpp"

int main(int argc, char** argv) { return goldlab::cli::run_cli(argc, argv); }
