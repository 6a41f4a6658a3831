#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include "mosaic/diagnostics.hpp"

int main(int argc, char** argv) {
    // Tests that care about warnings install a ScopedWarningCapture.
    mosaic::set_warning_sink([](const std::string&) {});
    doctest::Context context(argc, argv);
    return context.run();
}
