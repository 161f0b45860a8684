#include "trendratio/cli.hpp"

int main(int argc, char** argv) { return trendratio::cli_main(argc, argv); }
