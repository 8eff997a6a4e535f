#include "orbtriage/cli.hpp"

int main(int argc, char** argv) {
  return orbtriage::cli::run_cli(argc, argv);
}
