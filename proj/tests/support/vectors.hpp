#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

namespace testing_support {

/// `name hex` lines from tests/data/golden_vectors.txt.
inline std::map<std::string, std::string> golden_vectors() {
  std::ifstream in(ZIRCON_TEST_DATA "/golden_vectors.txt");
  if (!in) throw std::runtime_error("golden_vectors.txt not found");
  std::map<std::string, std::string> out;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string name, hex;
    fields >> name >> hex;
    out[name] = hex;
  }
  return out;
}

}  // namespace testing_support

namespace testing_support {

/// H -> bits from tests/data/bfp_bits.txt.
inline std::map<int, double> bfp_reference_bits() {
  std::ifstream in(ZIRCON_TEST_DATA "/bfp_bits.txt");
  if (!in) throw std::runtime_error("bfp_bits.txt not found");
  std::map<int, double> out;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    int h = 0;
    double bits = 0;
    fields >> h >> bits;
    out[h] = bits;
  }
  return out;
}

}  // namespace testing_support
