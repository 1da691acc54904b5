#pragma once

#include <gtest/gtest.h>

#include "secref/errors.hpp"

// Expects `stmt` to throw SecrefError with the given code.
#define EXPECT_SECREF_ERROR(stmt, expected)                              \
  do {                                                                   \
    try {                                                                \
      stmt;                                                              \
      ADD_FAILURE() << "no SecrefError from " #stmt;                     \
    } catch (const ::secref::SecrefError& e) {                           \
      EXPECT_EQ(e.code(), expected) << e.what();                         \
    }                                                                    \
  } while (0)
