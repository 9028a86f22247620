#include <cstdio>
int main(int argc, char** argv) {
  (void)argc; (void)argv;
  std::printf("acceptance scaffold\n");
  return 0;
}
