#pragma once

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <string>

// Always-on requirement: never compiled out in Release.
#define REQUIRE(cond, msg)                                                      \
    do {                                                                        \
        if (!(cond)) {                                                          \
            std::cerr << "[FAIL] " << __FILE__ << ":" << __LINE__ << " " << msg \
                      << "\n";                                                  \
            std::exit(1);                                                       \
        }                                                                       \
    } while (0)

#define REQUIRE_CLOSE(a, b, tol, msg)                                             \
    do {                                                                          \
        const double qa_ = (a), qb_ = (b), qt_ = (tol);                           \
        if (!(std::isfinite(qa_) && std::isfinite(qb_) &&                         \
              std::abs(qa_ - qb_) <= qt_)) {                                      \
            std::cerr << "[FAIL] " << __FILE__ << ":" << __LINE__ << " " << msg   \
                      << " (" << qa_ << " vs " << qb_ << ", tol " << qt_ << ")\n";\
            std::exit(1);                                                         \
        }                                                                         \
    } while (0)

#define REQUIRE_THROWS(expr, msg)                                               \
    do {                                                                        \
        bool threw_ = false;                                                    \
        try {                                                                   \
            (void)(expr);                                                       \
        } catch (const std::exception&) {                                       \
            threw_ = true;                                                      \
        }                                                                       \
        if (!threw_) {                                                          \
            std::cerr << "[FAIL] " << __FILE__ << ":" << __LINE__ << " " << msg \
                      << " (no exception)\n";                                   \
            std::exit(1);                                                       \
        }                                                                       \
    } while (0)

inline void test_done(const std::string& name) { std::cout << "[OK] " << name << "\n"; }
