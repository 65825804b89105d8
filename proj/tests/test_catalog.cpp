#include "stosym/catalog.hpp"

#include "stosym/errors.hpp"

#include <gtest/gtest.h>

using namespace stosym;

namespace {

std::string joined(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) out += s + "\n";
    return out;
}

}  // namespace

TEST(Catalog, UnknownModelThrows) { EXPECT_THROW(load("heston"), UnknownModel); }

TEST(Catalog, VerifyAllPasses) {
    for (const auto& name : catalog_names()) {
        const auto r = verify_all(load(name), 20);
        EXPECT_TRUE(r.pass) << name << ":\n" << joined(r.failures);
    }
}
