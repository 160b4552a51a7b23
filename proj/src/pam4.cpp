#include "mlse/pam4.hpp"

namespace mlse {

SymbolFrame map_pam4(const std::vector<int>& bits) {
  if (bits.size() % 2 != 0)
    throw std::invalid_argument("map_pam4: bit count must be even");
  SymbolFrame out;
  out.reserve(bits.size() / 2);
  for (std::size_t i = 0; i < bits.size(); i += 2) {
    const int b0 = bits[i];      // MSB
    const int b1 = bits[i + 1];  // LSB
    if ((b0 != 0 && b0 != 1) || (b1 != 0 && b1 != 1))
      throw std::invalid_argument("map_pam4: bits must be 0 or 1");
    if (b0 == 0)
      out.push_back(b1 == 0 ? -3 : -1);
    else
      out.push_back(b1 == 1 ? 1 : 3);
  }
  return out;
}

std::vector<int> demap_pam4(const SymbolFrame& symbols) {
  std::vector<int> out;
  out.reserve(symbols.size() * 2);
  for (int s : symbols) {
    switch (s) {
      case -3: out.push_back(0); out.push_back(0); break;
      case -1: out.push_back(0); out.push_back(1); break;
      case 1: out.push_back(1); out.push_back(1); break;
      case 3: out.push_back(1); out.push_back(0); break;
      default:
        throw std::invalid_argument("demap_pam4: symbol outside PAM4 alphabet");
    }
  }
  return out;
}

}  // namespace mlse
