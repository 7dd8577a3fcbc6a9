#include "vibron_app/cli.hpp"

int main(int argc, char** argv) { return vibron::app::cli_main(argc, argv); }
