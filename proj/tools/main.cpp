#include "cli.hpp"

int main(int argc, char** argv) { return scn2d::cli::run(argc, argv); }
