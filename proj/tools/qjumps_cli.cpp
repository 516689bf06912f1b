#include <iostream>

#include "qjumps/app/run.hpp"

int main(int argc, char** argv) { return qjumps::app::cli_main(argc, argv, std::cout, std::cerr); }
