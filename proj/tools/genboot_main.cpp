#include "genboot/harness/commands.hpp"

#include <malloc.h>

#include <string>
#include <vector>

int main(int argc, char** argv) {
    // Training allocates and frees many large temporaries; keeping them off
    // mmap avoids page-fault churn on every evaluation.
    mallopt(M_MMAP_THRESHOLD, 32 * 1024 * 1024);  // glibc maximum on 64-bit
    mallopt(M_TRIM_THRESHOLD, 512 * 1024 * 1024);
    const std::vector<std::string> args(argv, argv + argc);
    return genboot::harness::run_cli(args);
}
