#include <cstdio>

int main() {
  std::puts("qdm: subcommands not wired yet");
  return 2;
}
