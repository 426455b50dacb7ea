#include <iostream>

#include "lexcnn/cli.hpp"

int main(int argc, char** argv) {
  return lexcnn::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
