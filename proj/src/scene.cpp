#include "cdsl/scene.hpp"

#include <cmath>
#include <cstdlib>

namespace cdsl {

Orientation normalized(double degrees) {
    double d = std::fmod(degrees, 360.0);
    if (d < 0) d += 360.0;
    if (d == 360.0) d = 0.0;
    return Orientation{d};
}

double degree_distance(double a, double b) {
    double d = std::fabs(std::fmod(a - b, 360.0));
    return d <= 180.0 ? d : 360.0 - d;
}

const char* scene_kind_name(SceneKind k) {
    switch (k) {
        case SceneKind::rotation: return "rotation";
        case SceneKind::bingo: return "bingo";
        case SceneKind::logical3d: return "logical3d";
    }
    return "bingo";
}

SceneKind scene_kind_from_name(const std::string& name) {
    if (name == "rotation") return SceneKind::rotation;
    if (name == "bingo") return SceneKind::bingo;
    if (name == "logical3d") return SceneKind::logical3d;
    throw std::runtime_error("scene json: unknown kind '" + name + "'");
}

const char* action_kind_name(ActionKind k) {
    switch (k) {
        case ActionKind::click: return "click";
        case ActionKind::move: return "move";
        case ActionKind::rotate: return "rotate";
    }
    return "click";
}

static ActionKind action_kind_from_name(const std::string& name) {
    if (name == "click") return ActionKind::click;
    if (name == "move") return ActionKind::move;
    if (name == "rotate") return ActionKind::rotate;
    throw std::runtime_error("answer json: unknown kind '" + name + "'");
}

const SceneObject* find_object(const Scene& scene, const std::string& id) {
    for (const SceneObject& obj : scene.objects)
        if (obj.id == id) return &obj;
    return nullptr;
}

SceneObject* find_object(Scene& scene, const std::string& id) {
    for (SceneObject& obj : scene.objects)
        if (obj.id == id) return &obj;
    return nullptr;
}

const AttrValue* attr(const SceneObject& obj, const std::string& name) {
    auto it = obj.attrs.find(name);
    return it == obj.attrs.end() ? nullptr : &it->second;
}

std::optional<GridPos> position_of(const SceneObject& obj) {
    const AttrValue* v = attr(obj, "pos");
    if (v && std::holds_alternative<GridPos>(*v)) return std::get<GridPos>(*v);
    return std::nullopt;
}

const SceneObject* object_at(const Scene& scene, GridPos pos) {
    for (const SceneObject& obj : scene.objects)
        if (position_of(obj) == pos) return &obj;
    return nullptr;
}

// ---- bingo board rules ----

static bool fail(std::string* why, const char* reason) {
    if (why) *why = reason;
    return false;
}

bool apply_move(Scene& scene, const std::string& id, GridPos to, std::string* why) {
    SceneObject* mover = find_object(scene, id);
    if (!mover) return fail(why, "no such object");
    std::optional<GridPos> from = position_of(*mover);
    if (!from) return fail(why, "object has no grid position");
    if (!scene.grid) return fail(why, "scene has no grid");
    if (to.row < 1 || to.row > scene.grid->rows || to.col < 1 || to.col > scene.grid->cols)
        return fail(why, "target cell out of bounds");
    if (to == *from) return fail(why, "move to the same cell");
    if (scene.meta.value("adjacent_only", false) &&
        std::abs(to.row - from->row) + std::abs(to.col - from->col) != 1)
        return fail(why, "only moves to an adjacent cell are allowed");
    SceneObject* occupant = const_cast<SceneObject*>(object_at(scene, to));
    if (occupant && !scene.meta.value("swap_allowed", true))
        return fail(why, "target cell is occupied and swapping is not allowed");
    if (occupant) occupant->attrs["pos"] = *from;
    mover->attrs["pos"] = to;
    return true;
}

static std::string cell_color(const SceneObject& obj) {
    const AttrValue* c = attr(obj, "color");
    if (c && std::holds_alternative<std::string>(*c)) return std::get<std::string>(*c);
    return "\x01" + obj.id;  // occupied but colorless: breaks every run
}

bool any_completed_line(const Scene& scene, int line_length) {
    if (!scene.grid || line_length < 2) return false;
    std::vector<std::vector<std::string>> board(
        scene.grid->rows + 1, std::vector<std::string>(scene.grid->cols + 1));
    for (const SceneObject& obj : scene.objects)
        if (auto pos = position_of(obj)) board[pos->row][pos->col] = cell_color(obj);

    auto scan = [&](int outer, int inner, bool by_row) {
        for (int i = 1; i <= outer; ++i) {
            int run = 0;
            std::string prev;
            for (int j = 1; j <= inner; ++j) {
                const std::string& c = by_row ? board[i][j] : board[j][i];
                run = (!c.empty() && c == prev) ? run + 1 : (c.empty() ? 0 : 1);
                prev = c;
                if (run >= line_length) return true;
            }
        }
        return false;
    };
    return scan(scene.grid->rows, scene.grid->cols, true) ||
           scan(scene.grid->cols, scene.grid->rows, false);
}

bool move_completes_line(const Scene& scene, const std::string& id, GridPos to) {
    Scene working = scene;
    if (!apply_move(working, id, to)) return false;
    return any_completed_line(working, working.meta.value("line_length", 0));
}

std::vector<Action> completing_moves(const Scene& scene) {
    std::vector<Action> out;
    if (!scene.grid) return out;
    for (const SceneObject& obj : scene.objects) {
        if (!position_of(obj)) continue;
        for (int r = 1; r <= scene.grid->rows; ++r)
            for (int c = 1; c <= scene.grid->cols; ++c)
                if (move_completes_line(scene, obj.id, GridPos{r, c}))
                    out.push_back(Action{ActionKind::move, obj.id, GridPos{r, c}, 0});
    }
    return out;
}

// ---- answers ----

bool check_answer(const Scene& scene, const GroundTruth& truth, const Answer& answer) {
    if (answer.kind != truth.kind)
        throw KindMismatch(std::string("answer kind ") + action_kind_name(answer.kind) +
                           " does not match expected " + action_kind_name(truth.kind));
    switch (truth.kind) {
        case ActionKind::click: return answer.object_id == truth.object_id;
        case ActionKind::rotate:
            return degree_distance(answer.degrees, truth.target_degrees) <=
                   truth.tolerance + 1e-9;
        case ActionKind::move: return move_completes_line(scene, answer.object_id, answer.to);
    }
    return false;
}

// ---- JSON ----

Json attr_value_to_json(const AttrValue& v) {
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    if (const auto* n = std::get_if<long long>(&v)) return *n;
    if (const auto* o = std::get_if<Orientation>(&v)) return Json{{"degrees", o->degrees}};
    if (const auto* g = std::get_if<GridPos>(&v)) return Json{{"row", g->row}, {"col", g->col}};
    const auto& p = std::get<PointXY>(v);
    return Json{{"x", p.x}, {"y", p.y}};
}

AttrValue attr_value_from_json(const Json& j) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number_integer()) return j.get<long long>();
    if (j.is_object()) {
        if (j.contains("degrees")) return Orientation{j.at("degrees").get<double>()};
        if (j.contains("row")) return GridPos{j.at("row").get<int>(), j.at("col").get<int>()};
        if (j.contains("x")) return PointXY{j.at("x").get<double>(), j.at("y").get<double>()};
    }
    throw std::runtime_error("scene json: unrecognized attribute value " + j.dump());
}

Json scene_to_json(const Scene& scene) {
    Json j;
    j["kind"] = scene_kind_name(scene.kind);
    if (scene.grid) j["grid"] = Json{{"rows", scene.grid->rows}, {"cols", scene.grid->cols}};
    j["objects"] = Json::array();
    for (const SceneObject& obj : scene.objects) {
        Json o;
        o["id"] = obj.id;
        o["attrs"] = Json::object();
        for (const auto& [name, value] : obj.attrs) o["attrs"][name] = attr_value_to_json(value);
        j["objects"].push_back(std::move(o));
    }
    j["question"] = scene.question;
    j["meta"] = scene.meta;
    return j;
}

Scene scene_from_json(const Json& j) {
    Scene scene;
    scene.kind = scene_kind_from_name(j.at("kind").get<std::string>());
    if (j.contains("grid"))
        scene.grid = GridSize{j.at("grid").at("rows").get<int>(), j.at("grid").at("cols").get<int>()};
    for (const Json& o : j.at("objects")) {
        SceneObject obj;
        obj.id = o.at("id").get<std::string>();
        for (const auto& [name, value] : o.at("attrs").items())
            obj.attrs[name] = attr_value_from_json(value);
        scene.objects.push_back(std::move(obj));
    }
    scene.question = j.at("question").get<std::string>();
    scene.meta = j.value("meta", Json::object());
    return scene;
}

Json truth_to_json(const GroundTruth& truth) {
    Json j;
    j["kind"] = action_kind_name(truth.kind);
    switch (truth.kind) {
        case ActionKind::click: j["object_id"] = truth.object_id; break;
        case ActionKind::move:
            j["object_id"] = truth.object_id;
            j["to"] = Json{{"row", truth.to.row}, {"col", truth.to.col}};
            break;
        case ActionKind::rotate:
            j["target_degrees"] = truth.target_degrees;
            j["tolerance"] = truth.tolerance;
            break;
    }
    return j;
}

GroundTruth truth_from_json(const Json& j) {
    GroundTruth t;
    t.kind = action_kind_from_name(j.at("kind").get<std::string>());
    switch (t.kind) {
        case ActionKind::click: t.object_id = j.at("object_id").get<std::string>(); break;
        case ActionKind::move:
            t.object_id = j.at("object_id").get<std::string>();
            t.to = GridPos{j.at("to").at("row").get<int>(), j.at("to").at("col").get<int>()};
            break;
        case ActionKind::rotate:
            t.target_degrees = j.at("target_degrees").get<double>();
            t.tolerance = j.at("tolerance").get<double>();
            break;
    }
    return t;
}

Json answer_to_json(const Answer& answer) {
    Json j;
    j["kind"] = action_kind_name(answer.kind);
    j["object_id"] = answer.object_id;
    if (answer.kind == ActionKind::move)
        j["to"] = Json{{"row", answer.to.row}, {"col", answer.to.col}};
    if (answer.kind == ActionKind::rotate) j["degrees"] = answer.degrees;
    return j;
}

Answer answer_from_json(const Json& j) {
    Answer a;
    a.kind = action_kind_from_name(j.at("kind").get<std::string>());
    a.object_id = j.value("object_id", "");
    if (a.kind == ActionKind::move)
        a.to = GridPos{j.at("to").at("row").get<int>(), j.at("to").at("col").get<int>()};
    if (a.kind == ActionKind::rotate) a.degrees = j.at("degrees").get<double>();
    return a;
}

}  // namespace cdsl
