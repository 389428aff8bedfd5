#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qcluster/pda.hpp"

using namespace qcluster;

namespace {
SketchQueryResult query(bool new_flowlet, int prev) {
    SketchQueryResult q;
    q.is_new_flowlet = new_flowlet;
    q.prev_queue = prev;
    return q;
}
}  // namespace

TEST_CASE("a flowlet start goes wherever the clustering chose") {
    CHECK(pda::constrain(1, query(true, 5), PolicyKind::kPriorityOrdered) == 1);
    CHECK(pda::constrain(1, query(true, 5), PolicyKind::kFair) == 1);
}

TEST_CASE("priority-ordered packets may not rise above the previous queue") {
    CHECK(pda::constrain(1, query(false, 3), PolicyKind::kPriorityOrdered) == 3);
    CHECK(pda::constrain(5, query(false, 3), PolicyKind::kPriorityOrdered) == 5);
    CHECK(pda::constrain(3, query(false, 3), PolicyKind::kPriorityOrdered) == 3);
}

TEST_CASE("fair packets stay pinned to the previous queue") {
    CHECK(pda::constrain(0, query(false, 2), PolicyKind::kFair) == 2);
    CHECK(pda::constrain(7, query(false, 2), PolicyKind::kFair) == 2);
}

TEST_CASE("no record means no constraint") {
    CHECK(pda::constrain(4, query(false, kUnsetQueue), PolicyKind::kPriorityOrdered) == 4);
    CHECK(pda::constrain(4, query(false, kUnsetQueue), PolicyKind::kFair) == 4);
}
