#include <iostream>

#include "harness.hpp"

int main(int argc, char** argv) { return rhode::harness::run_cli(argc, argv, std::cerr); }
