// Symbolic challenge scenes: typed objects on an optional grid, ground truths,
// and the answer checker used as the oracle by generators, interpreter tests,
// and the pipeline.
#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "cdsl/json_util.hpp"

namespace cdsl {

class InfeasibleParams : public std::runtime_error {
public:
    explicit InfeasibleParams(const std::string& what) : std::runtime_error(what) {}
};

class KindMismatch : public std::runtime_error {
public:
    explicit KindMismatch(const std::string& what) : std::runtime_error(what) {}
};

// Degrees clockwise from up, normalized to [0, 360).
struct Orientation {
    double degrees = 0;
    bool operator==(const Orientation&) const = default;
};

Orientation normalized(double degrees);

// circular distance in degrees, in [0, 180]
double degree_distance(double a, double b);

// 1-based board coordinates; col maps to the DSL's x, row to y.
struct GridPos {
    int row = 0;
    int col = 0;
    bool operator==(const GridPos&) const = default;
};

struct PointXY {
    double x = 0;
    double y = 0;
    bool operator==(const PointXY&) const = default;
};

using AttrValue = std::variant<std::string, long long, Orientation, GridPos, PointXY>;

struct SceneObject {
    std::string id;
    std::map<std::string, AttrValue> attrs;
    bool operator==(const SceneObject&) const = default;
};

enum class SceneKind { rotation, bingo, logical3d };

const char* scene_kind_name(SceneKind k);
SceneKind scene_kind_from_name(const std::string& name);

struct GridSize {
    int rows = 0;
    int cols = 0;
    bool operator==(const GridSize&) const = default;
};

struct Scene {
    SceneKind kind = SceneKind::bingo;
    std::optional<GridSize> grid;
    std::vector<SceneObject> objects;
    std::string question;
    Json meta = Json::object();
    bool operator==(const Scene&) const = default;
};

enum class ActionKind { click, move, rotate };

const char* action_kind_name(ActionKind k);

// A performed (or proposed) action; doubles as the final Answer.
struct Action {
    ActionKind kind = ActionKind::click;
    std::string object_id;
    GridPos to;          // move
    double degrees = 0;  // rotate
    bool operator==(const Action&) const = default;
};

using Answer = Action;

struct GroundTruth {
    ActionKind kind = ActionKind::click;
    std::string object_id;      // click / move
    GridPos to;                 // move
    double target_degrees = 0;  // rotate
    double tolerance = 0;       // rotate
    bool operator==(const GroundTruth&) const = default;
};

// ---- lookup helpers ----

const SceneObject* find_object(const Scene& scene, const std::string& id);
SceneObject* find_object(Scene& scene, const std::string& id);
const SceneObject* object_at(const Scene& scene, GridPos pos);

const AttrValue* attr(const SceneObject& obj, const std::string& name);

// grid position, if the object has one
std::optional<GridPos> position_of(const SceneObject& obj);

// ---- bingo board rules ----

// Applies a single move under the scene's meta rules (bounds, adjacency,
// swap-on-occupied). Returns false and leaves the scene untouched when the
// move is illegal; *why receives a short reason when non-null.
bool apply_move(Scene& scene, const std::string& id, GridPos to, std::string* why = nullptr);

// true when any row or column contains >= line_length consecutive cells
// occupied by objects of one color
bool any_completed_line(const Scene& scene, int line_length);

// copy + apply_move + any_completed_line under scene.meta.line_length
bool move_completes_line(const Scene& scene, const std::string& id, GridPos to);

// every legal (object, cell) move that completes a line
std::vector<Action> completing_moves(const Scene& scene);

// ---- answers ----

// ClickAnswer by id; MoveAnswer by board effect (any line-completing legal
// move passes, not just the stored one); RotateAnswer within tolerance,
// circularly. Throws KindMismatch when the answer kind differs from the truth.
bool check_answer(const Scene& scene, const GroundTruth& truth, const Answer& answer);

// ---- JSON ----

Json attr_value_to_json(const AttrValue& v);
AttrValue attr_value_from_json(const Json& j);

Json scene_to_json(const Scene& scene);
Scene scene_from_json(const Json& j);

Json truth_to_json(const GroundTruth& truth);
GroundTruth truth_from_json(const Json& j);

Json answer_to_json(const Answer& answer);
Answer answer_from_json(const Json& j);

}  // namespace cdsl
