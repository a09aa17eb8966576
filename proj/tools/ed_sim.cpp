#include "ed/cli_app.hpp"

int main(int argc, char** argv) { return ed::run_cli(argc, argv); }
