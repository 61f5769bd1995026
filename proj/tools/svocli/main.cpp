#include "svo/cli.hpp"

int main(int argc, char** argv) { return svo::cli::run(argc, argv); }
