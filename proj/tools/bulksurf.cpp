#include <iostream>

#include "bulksurf/cli.hpp"

int main(int argc, char** argv) {
  try {
    const auto config = bulksurf::cli::parse_config(argc, argv);
    if (!config) return 0;
    return bulksurf::cli::run(*config);
  } catch (const bulksurf::cli::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
}
