#include <cstdio>

// placeholder entry point; the experiment driver replaces this
int main(int argc, char** argv) {
    (void)argc;
    (void)argv;
    std::fprintf(stderr, "motivic: experiment driver not wired up yet\n");
    return 2;
}
