#include <iostream>

#include "gallery_sync/cli.hpp"

int main(int argc, char** argv) { return gsync::cli::run(argc, argv, std::cout, std::cerr); }
