#include <doctest.h>

TEST_SUITE_BEGIN("eval");
TEST_SUITE_END();
