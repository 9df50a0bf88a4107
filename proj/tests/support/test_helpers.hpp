#pragma once

#include "jobrec/error.hpp"

#include <doctest.h>

#include <string>

// Asserts that `expr` throws jobrec::Error carrying `errc`.
#define CHECK_ERRC(expr, errc)                                                  \
    do {                                                                        \
        bool thrown_ = false;                                                   \
        try {                                                                   \
            (void)(expr);                                                       \
        } catch (const ::jobrec::Error& e_) {                                   \
            thrown_ = true;                                                     \
            CHECK_MESSAGE(e_.code() == (errc), "got " << e_.what());            \
        }                                                                       \
        CHECK_MESSAGE(thrown_, "expected " << ::jobrec::errc_name(errc));       \
    } while (false)

inline std::string data_path(const std::string& name) {
    return std::string(JOBREC_DATA_DIR) + "/" + name;
}
