#include "botmatch/cli.hpp"

int main(int argc, char** argv) { return botmatch::cli::run(argc, argv); }
