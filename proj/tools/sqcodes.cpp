#include "sq/cli.hpp"

int main(int argc, char** argv) { return sq::cli::run(argc, argv); }
