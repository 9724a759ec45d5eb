#include "specloc/cli.hpp"

int main(int argc, char** argv) { return specloc::cli::run(argc, argv); }
