#include <iostream>

#include "pose_eval/cli.hpp"

int main(int argc, char** argv) { return pose_eval::run_cli(argc, argv, std::cout, std::cerr); }
