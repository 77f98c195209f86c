#include "cli.hpp"

int main(int argc, char** argv) { return crvpinn::cli::run(argc, argv); }
