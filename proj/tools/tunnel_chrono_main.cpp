#include "tunnelchrono/cli.hpp"

int main(int argc, char** argv) { return tunnelchrono::cli::main_entry(argc, argv); }
