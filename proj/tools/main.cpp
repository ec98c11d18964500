#include "cli.hpp"

int main(int argc, char** argv) { return graphon_rds::cli_dispatch(argc, argv); }
