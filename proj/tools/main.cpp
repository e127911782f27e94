#include "fuvalkit/cli.hpp"

int main(int argc, char** argv) { return fuvalkit::cli::run(argc, argv); }
