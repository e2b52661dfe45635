#include "vgne/cli.hpp"

int main(int argc, char** argv) { return vgne::cli::main(argc, argv); }
