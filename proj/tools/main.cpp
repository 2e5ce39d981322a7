#include "iotmarket/cli.hpp"

int main(int argc, char** argv) { return iotmarket::run_cli(argc, argv); }
