#include <cstdio>

int main() {
    std::puts("obscost: placeholder");
    return 0;
}
