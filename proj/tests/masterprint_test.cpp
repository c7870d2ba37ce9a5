#include <doctest.h>

TEST_SUITE_BEGIN("masterprint");
TEST_SUITE_END();
