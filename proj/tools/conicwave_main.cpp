#include "conicwave/cli.hpp"

int main(int argc, char** argv) { return conicwave::cli::run(argc, argv); }
