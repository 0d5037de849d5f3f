#include "metacog/cli/commands.hpp"

int main(int argc, char** argv) { return metacog::cli::main(argc, argv); }
