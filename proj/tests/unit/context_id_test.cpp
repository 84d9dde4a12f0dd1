#include <gtest/gtest.h>

#include <sstream>

#include "rbc/context_id.hpp"

using rbc::ContextId;
using rbc::derive_range_ctx;

TEST(ContextId, DeriveUpperHalf) {
    const ContextId parent{7, 3, 0, 15, 0};
    EXPECT_EQ(derive_range_ctx(parent, 8, 15), (ContextId{7, 3, 8, 15, 1}));
}

TEST(ContextId, IdentityRangeDiffersOnlyInGeneration) {
    const ContextId parent{7, 3, 0, 15, 0};
    const ContextId child = derive_range_ctx(parent, 0, 15);
    EXPECT_EQ(child, (ContextId{7, 3, 0, 15, 1}));
    EXPECT_NE(child, parent);
}

TEST(ContextId, NestedDerivationComposesOffsets) {
    const ContextId root{0, 0, 0, 63, 0};
    const ContextId a = derive_range_ctx(root, 16, 47);
    const ContextId b = derive_range_ctx(a, 4, 9);
    EXPECT_EQ(b, (ContextId{0, 0, 20, 25, 2}));
}

TEST(ContextId, RejectsOutOfBounds) {
    const ContextId parent{1, 1, 10, 20, 0};
    EXPECT_THROW(derive_range_ctx(parent, -1, 3), std::invalid_argument);
    EXPECT_THROW(derive_range_ctx(parent, 5, 4), std::invalid_argument);
    EXPECT_THROW(derive_range_ctx(parent, 0, 11), std::invalid_argument);
    EXPECT_NO_THROW(derive_range_ctx(parent, 0, 10));
}

TEST(ContextId, PrintsTuple) {
    std::ostringstream os;
    os << ContextId{1, 2, 3, 4, 5};
    EXPECT_EQ(os.str(), "<1,2,3,4,5>");
}
