#include <doctest.h>

#include <set>
#include <string>
#include <vector>

#include "cdsl/generators.hpp"
#include "cdsl/scene.hpp"

using namespace cdsl;

namespace {

const std::vector<std::string> kColors = {"red", "blue", "green"};
const std::vector<std::string> kShapes = {"cube", "sphere", "cone"};
const std::vector<std::string> kValues = {"0", "W", "A", "7"};

Answer truth_as_answer(const GroundTruth& t) {
    Answer a;
    a.kind = t.kind;
    a.object_id = t.object_id;
    a.to = t.to;
    a.degrees = t.target_degrees;
    return a;
}

void check_board_invariants(const Scene& scene) {
    REQUIRE(scene.grid.has_value());
    std::set<std::pair<int, int>> cells;
    std::set<std::string> ids;
    for (const SceneObject& obj : scene.objects) {
        CHECK(ids.insert(obj.id).second);
        auto pos = position_of(obj);
        REQUIRE(pos.has_value());
        CHECK(pos->row >= 1);
        CHECK(pos->row <= scene.grid->rows);
        CHECK(pos->col >= 1);
        CHECK(pos->col <= scene.grid->cols);
        CHECK(cells.insert({pos->row, pos->col}).second);
    }
}

}  // namespace

TEST_CASE("bingo scenes have exactly one completing move, the ground truth") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        auto [scene, truth] = gen_bingo(3, 3, kColors, 3, false, seed);
        check_board_invariants(scene);
        CHECK(!any_completed_line(scene, 3));
        auto moves = completing_moves(scene);
        REQUIRE(moves.size() == 1);
        CHECK(moves[0].object_id == truth.object_id);
        CHECK(moves[0].to == truth.to);
        CHECK(check_answer(scene, truth, truth_as_answer(truth)));
    }
}

TEST_CASE("adjacent-only bingo truths are one cell away") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        auto [scene, truth] = gen_bingo(4, 4, kColors, 3, true, seed);
        CHECK(scene.meta["adjacent_only"] == true);
        auto from = position_of(*find_object(scene, truth.object_id));
        REQUIRE(from.has_value());
        int dist = std::abs(from->row - truth.to.row) + std::abs(from->col - truth.to.col);
        CHECK(dist == 1);
        auto moves = completing_moves(scene);
        REQUIRE(moves.size() == 1);
        CHECK(check_answer(scene, truth, truth_as_answer(truth)));
    }
}

TEST_CASE("bingo scenes hold a longer line when asked") {
    auto [scene, truth] = gen_bingo(5, 5, kColors, 5, false, 11);
    CHECK(scene.meta["line_length"] == 5);
    CHECK(check_answer(scene, truth, truth_as_answer(truth)));
}

TEST_CASE("bingo generation is deterministic in the seed") {
    auto a = gen_bingo(3, 3, kColors, 3, false, 42);
    auto b = gen_bingo(3, 3, kColors, 3, false, 42);
    CHECK(scene_to_json(a.first).dump() == scene_to_json(b.first).dump());
    CHECK(a.second == b.second);
    auto c = gen_bingo(3, 3, kColors, 3, false, 43);
    CHECK(scene_to_json(a.first).dump() != scene_to_json(c.first).dump());
}

TEST_CASE("bingo rejects boards it cannot make solvable") {
    CHECK_THROWS_AS(gen_bingo(3, 3, {"red"}, 3, false, 1), InfeasibleParams);
    CHECK_THROWS_AS(gen_bingo(2, 3, kColors, 3, false, 1), InfeasibleParams);
    CHECK_THROWS_AS(gen_bingo(3, 3, kColors, 2, false, 1), InfeasibleParams);
}

TEST_CASE("rotation scenes use distinct degree-step multiples") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        auto [scene, truth] = gen_rotation({"dog", "cat"}, {"hand", "arrow"}, 45, seed);
        REQUIRE(scene.objects.size() == 2);
        double subject = -1, reference = -1;
        for (const SceneObject& obj : scene.objects) {
            const auto& role = std::get<std::string>(*attr(obj, "role"));
            double deg = std::get<Orientation>(*attr(obj, "orientation")).degrees;
            CHECK(static_cast<int>(deg) % 45 == 0);
            (role == "subject" ? subject : reference) = deg;
        }
        CHECK(subject >= 0);
        CHECK(reference >= 0);
        CHECK(subject != reference);
        CHECK(truth.target_degrees == reference);
        CHECK(truth.tolerance == 22.5);
        CHECK(check_answer(scene, truth, truth_as_answer(truth)));
    }
}

TEST_CASE("rotation generation is deterministic and validates the step") {
    auto a = gen_rotation({"dog"}, {"hand"}, 90, 7);
    auto b = gen_rotation({"dog"}, {"hand"}, 90, 7);
    CHECK(scene_to_json(a.first).dump() == scene_to_json(b.first).dump());
    CHECK_THROWS_AS(gen_rotation({"dog"}, {"hand"}, 360, 1), InfeasibleParams);
    CHECK_THROWS_AS(gen_rotation({"dog"}, {"hand"}, 0, 1), InfeasibleParams);
    CHECK_THROWS_AS(gen_rotation({"dog"}, {"hand"}, 77, 1), InfeasibleParams);
    CHECK_THROWS_AS(gen_rotation({}, {"hand"}, 45, 1), InfeasibleParams);
}

TEST_CASE("same-orientation scenes single out one candidate") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        auto [scene, truth] = gen_logical3d(kShapes, kColors, {"0", "W"}, 4,
                                            QuestionTemplate::same_orientation, seed);
        check_board_invariants(scene);
        int references = 0, matches = 0;
        Orientation ref_dir;
        for (const SceneObject& obj : scene.objects)
            if (std::get<std::string>(*attr(obj, "value")) == "W") {
                ++references;
                ref_dir = std::get<Orientation>(*attr(obj, "orientation"));
            }
        REQUIRE(references == 1);
        std::string match_id;
        for (const SceneObject& obj : scene.objects)
            if (std::get<std::string>(*attr(obj, "value")) == "0" &&
                std::get<Orientation>(*attr(obj, "orientation")) == ref_dir) {
                ++matches;
                match_id = obj.id;
            }
        CHECK(matches == 1);
        CHECK(truth.object_id == match_id);
        CHECK(check_answer(scene, truth, truth_as_answer(truth)));
    }
}

TEST_CASE("left-of-larger scenes have a unique largest object left of the anchor") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        auto [scene, truth] = gen_logical3d(kShapes, kColors, kValues, 5,
                                            QuestionTemplate::left_of_larger, seed);
        check_board_invariants(scene);
        int anchor_col = -1;
        for (const SceneObject& obj : scene.objects)
            if (std::get<std::string>(*attr(obj, "color")) == kColors[0])
                anchor_col = position_of(obj)->col;
        REQUIRE(anchor_col >= 3);
        long long best = -1;
        std::vector<std::string> best_ids;
        for (const SceneObject& obj : scene.objects) {
            if (position_of(obj)->col >= anchor_col) continue;
            long long size = std::get<long long>(*attr(obj, "size"));
            if (size > best) {
                best = size;
                best_ids = {obj.id};
            } else if (size == best) {
                best_ids.push_back(obj.id);
            }
        }
        REQUIRE(best_ids.size() == 1);
        CHECK(best_ids[0] == truth.object_id);
    }
}

TEST_CASE("color-shape scenes have a unique color and shape pairing") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        auto [scene, truth] = gen_logical3d(kShapes, kColors, kValues, 6,
                                            QuestionTemplate::color_shape, seed);
        check_board_invariants(scene);
        std::string color = scene.meta["color"].get<std::string>();
        std::string shape = scene.meta["shape"].get<std::string>();
        int hits = 0;
        std::string hit_id;
        for (const SceneObject& obj : scene.objects)
            if (std::get<std::string>(*attr(obj, "color")) == color &&
                std::get<std::string>(*attr(obj, "shape")) == shape) {
                ++hits;
                hit_id = obj.id;
            }
        CHECK(hits == 1);
        CHECK(hit_id == truth.object_id);
    }
}

TEST_CASE("logical3d generation is deterministic and bounds its parameters") {
    auto a = gen_logical3d(kShapes, kColors, kValues, 5, QuestionTemplate::same_orientation, 3);
    auto b = gen_logical3d(kShapes, kColors, kValues, 5, QuestionTemplate::same_orientation, 3);
    CHECK(scene_to_json(a.first).dump() == scene_to_json(b.first).dump());
    CHECK_THROWS_AS(gen_logical3d(kShapes, kColors, kValues, 1,
                                  QuestionTemplate::same_orientation, 1),
                    InfeasibleParams);
    CHECK_THROWS_AS(gen_logical3d({"cube"}, {"red"}, kValues, 4,
                                  QuestionTemplate::color_shape, 1),
                    InfeasibleParams);
    CHECK_THROWS_AS(gen_logical3d(kShapes, kColors, {"0"}, 4,
                                  QuestionTemplate::same_orientation, 1),
                    InfeasibleParams);
    CHECK_THROWS_AS(gen_logical3d(kShapes, {}, kValues, 4,
                                  QuestionTemplate::same_orientation, 1),
                    InfeasibleParams);
}

TEST_CASE("question template names round-trip") {
    for (QuestionTemplate t : {QuestionTemplate::same_orientation,
                               QuestionTemplate::left_of_larger, QuestionTemplate::color_shape})
        CHECK(question_template_from_name(question_template_name(t)) == t);
    CHECK_THROWS_AS(question_template_from_name("nope"), InfeasibleParams);
}
