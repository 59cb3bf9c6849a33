#include <doctest.h>

#include <string>

#include "cdsl/scene.hpp"

using namespace cdsl;

namespace {

SceneObject piece(const std::string& id, const std::string& color, int row, int col) {
    SceneObject obj;
    obj.id = id;
    obj.attrs["color"] = color;
    obj.attrs["pos"] = GridPos{row, col};
    return obj;
}

// 3x3 board: red at (1,1) (1,2) and (2,3); gap for a row line at (1,3)
Scene small_board() {
    Scene scene;
    scene.kind = SceneKind::bingo;
    scene.grid = GridSize{3, 3};
    scene.objects = {piece("a", "red", 1, 1), piece("b", "red", 1, 2),
                     piece("c", "red", 2, 3), piece("d", "blue", 3, 1)};
    scene.meta["line_length"] = 3;
    scene.meta["swap_allowed"] = true;
    scene.meta["adjacent_only"] = false;
    return scene;
}

}  // namespace

TEST_CASE("orientation normalization wraps into [0, 360)") {
    CHECK(normalized(45).degrees == 45.0);
    CHECK(normalized(-45).degrees == 315.0);
    CHECK(normalized(360).degrees == 0.0);
    CHECK(normalized(720.5).degrees == 0.5);
}

TEST_CASE("degree distance is circular and symmetric") {
    CHECK(degree_distance(350, 10) == doctest::Approx(20));
    CHECK(degree_distance(10, 350) == doctest::Approx(20));
    CHECK(degree_distance(90, 100) == doctest::Approx(10));
    CHECK(degree_distance(0, 180) == doctest::Approx(180));
    CHECK(degree_distance(90 + 360, 100) == doctest::Approx(10));
}

TEST_CASE("scene json round-trips every attribute value form") {
    Scene scene;
    scene.kind = SceneKind::logical3d;
    scene.grid = GridSize{3, 4};
    SceneObject obj;
    obj.id = "obj1";
    obj.attrs["color"] = std::string("red");
    obj.attrs["size"] = 5LL;
    obj.attrs["orientation"] = Orientation{45.0};
    obj.attrs["pos"] = GridPos{2, 3};
    obj.attrs["anchor"] = PointXY{1.5, 2.5};
    scene.objects.push_back(obj);
    scene.question = "Click the red thing.";
    scene.meta["template"] = "color_shape";

    Json j = scene_to_json(scene);
    CHECK(scene_from_json(j) == scene);
    CHECK(j["objects"][0]["attrs"]["pos"]["row"] == 2);
    CHECK(j["objects"][0]["attrs"]["orientation"]["degrees"] == 45.0);
}

TEST_CASE("scene json omits the grid when absent") {
    Scene scene;
    scene.kind = SceneKind::rotation;
    Json j = scene_to_json(scene);
    CHECK(!j.contains("grid"));
    CHECK(scene_from_json(j) == scene);
}

TEST_CASE("ground truth json round-trips all three kinds") {
    GroundTruth click{ActionKind::click, "obj2", {}, 0, 0};
    GroundTruth move{ActionKind::move, "obj1", GridPos{1, 3}, 0, 0};
    GroundTruth rotate{ActionKind::rotate, "", {}, 90, 22.5};
    for (const GroundTruth& t : {click, move, rotate}) CHECK(truth_from_json(truth_to_json(t)) == t);
    CHECK(truth_to_json(rotate)["tolerance"] == 22.5);
}

TEST_CASE("answer json round-trips") {
    Answer move{ActionKind::move, "obj1", GridPos{2, 2}, 0};
    Answer rotate{ActionKind::rotate, "obj9", {}, 135};
    CHECK(answer_from_json(answer_to_json(move)) == move);
    CHECK(answer_from_json(answer_to_json(rotate)) == rotate);
}

TEST_CASE("click answers compare by object id") {
    Scene scene = small_board();
    GroundTruth truth{ActionKind::click, "b", {}, 0, 0};
    CHECK(check_answer(scene, truth, Answer{ActionKind::click, "b", {}, 0}));
    CHECK(!check_answer(scene, truth, Answer{ActionKind::click, "a", {}, 0}));
}

TEST_CASE("rotate answers accept within tolerance, circularly") {
    Scene scene;
    scene.kind = SceneKind::rotation;
    GroundTruth truth{ActionKind::rotate, "", {}, 90, 22.5};
    CHECK(check_answer(scene, truth, Answer{ActionKind::rotate, "", {}, 100}));
    CHECK(!check_answer(scene, truth, Answer{ActionKind::rotate, "", {}, 130}));
    CHECK(check_answer(scene, truth, Answer{ActionKind::rotate, "", {}, 100 + 360}));
    CHECK(check_answer(scene, truth, Answer{ActionKind::rotate, "", {}, 90 - 22.5}));
}

TEST_CASE("a kind mismatch between answer and truth throws") {
    Scene scene = small_board();
    GroundTruth truth{ActionKind::move, "c", GridPos{1, 3}, 0, 0};
    CHECK_THROWS_AS(check_answer(scene, truth, Answer{ActionKind::click, "c", {}, 0}),
                    KindMismatch);
}

TEST_CASE("any legal line-completing move is a correct move answer") {
    Scene scene = small_board();
    GroundTruth truth{ActionKind::move, "c", GridPos{1, 3}, 0, 0};
    CHECK(check_answer(scene, truth, Answer{ActionKind::move, "c", GridPos{1, 3}, 0}));
    // the blue piece in the gap completes nothing
    CHECK(!check_answer(scene, truth, Answer{ActionKind::move, "d", GridPos{1, 3}, 0}));
    // moving a red piece somewhere unrelated completes nothing
    CHECK(!check_answer(scene, truth, Answer{ActionKind::move, "a", GridPos{3, 3}, 0}));

    // a board with two completing moves accepts the one the truth does not name
    Scene two = small_board();
    two.objects.push_back(piece("e", "red", 3, 3));
    CHECK(check_answer(two, truth, Answer{ActionKind::move, "e", GridPos{1, 3}, 0}));
}

TEST_CASE("move answers respect board legality") {
    Scene scene = small_board();
    GroundTruth truth{ActionKind::move, "c", GridPos{1, 3}, 0, 0};
    CHECK(!check_answer(scene, truth, Answer{ActionKind::move, "c", GridPos{0, 3}, 0}));
    CHECK(!check_answer(scene, truth, Answer{ActionKind::move, "c", GridPos{2, 3}, 0}));
    CHECK(!check_answer(scene, truth, Answer{ActionKind::move, "zz", GridPos{1, 3}, 0}));
}

TEST_CASE("apply_move swaps with the occupant when allowed") {
    Scene scene = small_board();
    REQUIRE(apply_move(scene, "a", GridPos{1, 2}));
    CHECK(position_of(*find_object(scene, "a")) == GridPos{1, 2});
    CHECK(position_of(*find_object(scene, "b")) == GridPos{1, 1});
}

TEST_CASE("apply_move rejects occupied targets when swapping is disabled") {
    Scene scene = small_board();
    scene.meta["swap_allowed"] = false;
    std::string why;
    CHECK(!apply_move(scene, "a", GridPos{1, 2}, &why));
    CHECK(why.find("swap") != std::string::npos);
    CHECK(position_of(*find_object(scene, "a")) == GridPos{1, 1});
}

TEST_CASE("apply_move enforces the adjacency rule when enabled") {
    Scene scene = small_board();
    scene.meta["adjacent_only"] = true;
    CHECK(apply_move(scene, "c", GridPos{1, 3}));  // (2,3) -> (1,3) is adjacent
    Scene again = small_board();
    again.meta["adjacent_only"] = true;
    CHECK(!apply_move(again, "d", GridPos{1, 3}));  // (3,1) -> (1,3) is not
}

TEST_CASE("line detection sees rows, columns, and gaps") {
    Scene scene = small_board();
    CHECK(!any_completed_line(scene, 3));
    REQUIRE(apply_move(scene, "c", GridPos{1, 3}));
    CHECK(any_completed_line(scene, 3));

    Scene vertical;
    vertical.kind = SceneKind::bingo;
    vertical.grid = GridSize{3, 3};
    vertical.objects = {piece("a", "red", 1, 2), piece("b", "red", 2, 2),
                        piece("c", "red", 3, 2)};
    CHECK(any_completed_line(vertical, 3));

    Scene gapped = vertical;
    find_object(gapped, "b")->attrs["pos"] = GridPos{2, 3};
    CHECK(!any_completed_line(gapped, 3));
}

TEST_CASE("colorless objects never join a run") {
    Scene scene;
    scene.kind = SceneKind::bingo;
    scene.grid = GridSize{1, 3};
    scene.objects = {piece("a", "red", 1, 1), piece("b", "red", 1, 2)};
    SceneObject blank;
    blank.id = "c";
    blank.attrs["pos"] = GridPos{1, 3};
    scene.objects.push_back(blank);
    CHECK(!any_completed_line(scene, 3));
}

TEST_CASE("completing_moves enumerates exactly the winning moves") {
    Scene scene = small_board();
    auto moves = completing_moves(scene);
    REQUIRE(moves.size() == 1);
    CHECK(moves[0].object_id == "c");
    CHECK(moves[0].to == GridPos{1, 3});
}
