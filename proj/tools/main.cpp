#include "eulerfield/cli.hpp"

int main(int argc, char** argv) { return eulerfield::cli::run(argc, argv); }
