#include "commands.hpp"

int main(int argc, char** argv) {
  return mapland::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
