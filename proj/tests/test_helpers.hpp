#pragma once

#include <gtest/gtest.h>

#include <functional>
#include <string>

#include "beam/error.hpp"

namespace beam::test {

/// Runs `f` and checks that it throws beam::Error of the given kind whose
/// message contains `fragment`.
inline ::testing::AssertionResult throws_kind(const std::function<void()>& f, ErrorKind kind,
                                              const std::string& fragment = {})
{
    try {
        f();
    } catch (const Error& e) {
        if (e.kind() != kind) {
            return ::testing::AssertionFailure()
                   << "threw " << to_string(e.kind()) << " (" << e.what() << "), expected " << to_string(kind);
        }
        if (std::string(e.what()).find(fragment) == std::string::npos) {
            return ::testing::AssertionFailure() << "message '" << e.what() << "' lacks '" << fragment << "'";
        }
        return ::testing::AssertionSuccess();
    }
    return ::testing::AssertionFailure() << "did not throw";
}

}  // namespace beam::test
