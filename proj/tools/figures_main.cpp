#include <iostream>

#include "figures.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: qamp_figures OUTPUT_DIR\n";
    return 2;
  }
  return qamp::cli::write_figure_suite(argv[1], std::cout) == 0 ? 0 : 1;
}
