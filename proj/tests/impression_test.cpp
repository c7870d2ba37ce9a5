#include <doctest.h>

TEST_SUITE_BEGIN("impression");
TEST_SUITE_END();
