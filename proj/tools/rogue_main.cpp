#include "rogue/cli.hpp"

int main(int argc, char** argv) { return rogue::cli::main_entry(argc, argv); }
