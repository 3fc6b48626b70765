#include "cvxkit/problem_io.hpp"

int main(int argc, char** argv) { return cvxkit::run_cli(argc, argv); }
