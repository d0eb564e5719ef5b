#include <cstdio>

int main() {
    std::puts("gzk: command-line interface not wired up yet");
    return 1;
}
