#include <doctest.h>

TEST_SUITE_BEGIN("matcher");
TEST_SUITE_END();
