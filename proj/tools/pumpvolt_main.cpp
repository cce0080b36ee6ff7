#include <cstdio>

int main() {
  std::puts("pumpvolt: not wired yet");
  return 1;
}
