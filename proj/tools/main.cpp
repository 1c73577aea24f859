#include "emars/cli.hpp"

int main(int argc, char** argv) { return emars::cli::run(argc, argv); }
