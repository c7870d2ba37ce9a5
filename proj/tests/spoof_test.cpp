#include <doctest.h>

TEST_SUITE_BEGIN("spoof");
TEST_SUITE_END();
