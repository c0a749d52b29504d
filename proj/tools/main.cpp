#include <cstdio>

int main() {
  std::fprintf(stderr, "pairsamp: command line not wired up yet\n");
  return 1;
}
