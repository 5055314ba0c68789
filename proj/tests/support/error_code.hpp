#pragma once

#include <gtest/gtest.h>

#include "docmine/error.hpp"

namespace docmine::testing {

/// Runs `fn` and returns the code of the docmine::Error it throws.
template <typename Fn>
Errc error_code(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected docmine::Error";
  return Errc::io_failure;
}

}  // namespace docmine::testing
