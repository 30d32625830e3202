#include "fermimap/cli.hpp"

int main(int argc, char** argv) { return fermimap::cli::run(argc, argv); }
