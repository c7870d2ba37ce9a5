#include <doctest.h>

TEST_SUITE_BEGIN("minutiae");
TEST_SUITE_END();
