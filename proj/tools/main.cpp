#include "strips11/cli.hpp"

int main(int argc, char** argv) { return strips11::cli::run(argc, argv); }
