#include <iostream>

int main() {
  std::cout << "ebc: placeholder\n";
  return 0;
}
