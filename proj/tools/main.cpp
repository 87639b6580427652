#include "cli.hpp"

int main(int argc, char** argv) { return pucut::cli::main(argc, argv); }
