#include "affiso/cli/app.hpp"

int main(int argc, char** argv) { return affiso::cli::run_cli(argc, argv); }
