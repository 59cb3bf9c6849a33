#include <algorithm>

#include "cdsl/generators.hpp"
#include "cdsl/rng.hpp"

namespace cdsl {

const char* question_template_name(QuestionTemplate t) {
    switch (t) {
        case QuestionTemplate::same_orientation: return "same_orientation";
        case QuestionTemplate::left_of_larger: return "left_of_larger";
        case QuestionTemplate::color_shape: return "color_shape";
    }
    return "same_orientation";
}

QuestionTemplate question_template_from_name(const std::string& name) {
    if (name == "same_orientation") return QuestionTemplate::same_orientation;
    if (name == "left_of_larger") return QuestionTemplate::left_of_larger;
    if (name == "color_shape") return QuestionTemplate::color_shape;
    throw InfeasibleParams("unknown question template '" + name + "'");
}

namespace {

constexpr int kDirections = 8;  // orientations are multiples of 45 degrees

Orientation direction(int idx) { return Orientation{idx * 45.0}; }

struct Draft {
    std::vector<SceneObject> objects;
    std::string question;
    Json meta = Json::object();
    int target_index = -1;
};

std::vector<GridPos> distinct_cells(Rng& rng, int rows, int cols, int n) {
    std::vector<GridPos> cells;
    for (int r = 1; r <= rows; ++r)
        for (int c = 1; c <= cols; ++c) cells.push_back({r, c});
    rng.shuffle(cells);
    cells.resize(n);
    return cells;
}

// One reference (value_vocab[1]) at some direction; candidates (value_vocab[0])
// of which exactly one shares it; optional fillers from the rest of the vocab.
bool draft_same_orientation(Rng& rng, const std::vector<std::string>& color_vocab,
                            const std::vector<std::string>& value_vocab, int n_objects, int rows,
                            int cols, Draft& out) {
    if (value_vocab.size() < 2) return false;
    const std::string& candidate_value = value_vocab[0];
    const std::string& reference_value = value_vocab[1];
    int max_fillers = value_vocab.size() > 2 ? n_objects - 3 : 0;
    int fillers = max_fillers > 0 ? static_cast<int>(rng.below(max_fillers + 1)) : 0;
    int candidates = n_objects - 1 - fillers;
    if (candidates < 2) return false;

    int shared = static_cast<int>(rng.below(kDirections));
    std::vector<GridPos> cells = distinct_cells(rng, rows, cols, n_objects);
    int target = static_cast<int>(rng.below(candidates));

    for (int i = 0; i < n_objects; ++i) {
        SceneObject obj;
        obj.attrs["color"] = rng.pick(color_vocab);
        obj.attrs["pos"] = cells[i];
        if (i < candidates) {
            obj.attrs["value"] = candidate_value;
            int dir = i == target
                          ? shared
                          : static_cast<int>((shared + 1 + rng.below(kDirections - 1)) %
                                             kDirections);
            obj.attrs["orientation"] = direction(dir);
        } else if (i == candidates) {
            obj.attrs["value"] = reference_value;
            obj.attrs["orientation"] = direction(shared);
        } else {
            obj.attrs["value"] = value_vocab[2 + rng.below(value_vocab.size() - 2)];
            obj.attrs["orientation"] = direction(static_cast<int>(rng.below(kDirections)));
        }
        out.objects.push_back(std::move(obj));
    }
    out.target_index = target;
    out.question = "Click the " + candidate_value + " that has the same orientation as the " +
                   reference_value + ".";
    out.meta["candidate_value"] = candidate_value;
    out.meta["reference_value"] = reference_value;
    return true;
}

// One uniquely-colored anchor; among the objects strictly left of it, a unique
// largest one is the target. One object per column keeps the x-order clean.
bool draft_left_of_larger(Rng& rng, const std::vector<std::string>& shape_vocab,
                          const std::vector<std::string>& color_vocab, int n_objects, int rows,
                          Draft& out) {
    if (color_vocab.size() < 2) return false;
    const std::string& anchor_color = color_vocab[0];
    int anchor_slot = static_cast<int>(rng.range(3, n_objects));  // >= 2 objects to its left
    int target_slot = static_cast<int>(rng.range(1, anchor_slot - 1));
    const int target_size = 5;

    for (int i = 1; i <= n_objects; ++i) {
        SceneObject obj;
        bool is_anchor = i == anchor_slot;
        obj.attrs["color"] = is_anchor
                                 ? anchor_color
                                 : color_vocab[1 + rng.below(color_vocab.size() - 1)];
        obj.attrs["pos"] = GridPos{static_cast<int>(rng.range(1, rows)), i};
        obj.attrs["shape"] = rng.pick(shape_vocab);
        long long size;
        if (i == target_slot)
            size = target_size;
        else if (i < anchor_slot)
            size = rng.range(1, target_size - 1);  // strictly below the target
        else
            size = rng.range(1, target_size);
        obj.attrs["size"] = size;
        out.objects.push_back(std::move(obj));
        if (i == target_slot) out.target_index = static_cast<int>(out.objects.size()) - 1;
    }
    out.question = "Click the largest object to the left of the " + anchor_color + " object.";
    out.meta["anchor_color"] = anchor_color;
    out.meta["target_size"] = target_size;
    return true;
}

// Exactly one object carries the asked color+shape combination.
bool draft_color_shape(Rng& rng, const std::vector<std::string>& shape_vocab,
                       const std::vector<std::string>& color_vocab, int n_objects, int rows,
                       int cols, Draft& out) {
    if (color_vocab.size() < 2 && shape_vocab.size() < 2) return false;
    const std::string& want_color = rng.pick(color_vocab);
    const std::string& want_shape = rng.pick(shape_vocab);
    std::vector<GridPos> cells = distinct_cells(rng, rows, cols, n_objects);
    int target = static_cast<int>(rng.below(n_objects));

    for (int i = 0; i < n_objects; ++i) {
        SceneObject obj;
        std::string color, shape;
        if (i == target) {
            color = want_color;
            shape = want_shape;
        } else {
            do {
                color = rng.pick(color_vocab);
                shape = rng.pick(shape_vocab);
            } while (color == want_color && shape == want_shape);
        }
        obj.attrs["color"] = color;
        obj.attrs["pos"] = cells[i];
        obj.attrs["shape"] = shape;
        out.objects.push_back(std::move(obj));
    }
    out.target_index = target;
    out.question = "Click the " + want_color + " " + want_shape + ".";
    out.meta["color"] = want_color;
    out.meta["shape"] = want_shape;
    return true;
}

// Independent re-derivation of the unique satisfying object; generation is
// accepted only when it agrees with the intended target.
int scan_unique_target(const Scene& scene, QuestionTemplate t) {
    const auto str = [](const SceneObject& o, const char* name) -> std::string {
        const AttrValue* v = attr(o, name);
        return v && std::holds_alternative<std::string>(*v) ? std::get<std::string>(*v) : "";
    };
    std::vector<int> hits;
    switch (t) {
        case QuestionTemplate::same_orientation: {
            std::string cand = scene.meta.at("candidate_value").get<std::string>();
            std::string ref_val = scene.meta.at("reference_value").get<std::string>();
            std::vector<int> refs;
            for (std::size_t i = 0; i < scene.objects.size(); ++i)
                if (str(scene.objects[i], "value") == ref_val) refs.push_back(i);
            if (refs.size() != 1) return -1;
            const AttrValue* ro = attr(scene.objects[refs[0]], "orientation");
            for (std::size_t i = 0; i < scene.objects.size(); ++i) {
                if (str(scene.objects[i], "value") != cand) continue;
                const AttrValue* oo = attr(scene.objects[i], "orientation");
                if (oo && ro && *oo == *ro) hits.push_back(i);
            }
            break;
        }
        case QuestionTemplate::left_of_larger: {
            std::string anchor_color = scene.meta.at("anchor_color").get<std::string>();
            std::vector<int> anchors;
            for (std::size_t i = 0; i < scene.objects.size(); ++i)
                if (str(scene.objects[i], "color") == anchor_color) anchors.push_back(i);
            if (anchors.size() != 1) return -1;
            int anchor_col = position_of(scene.objects[anchors[0]])->col;
            long long best = -1;
            for (std::size_t i = 0; i < scene.objects.size(); ++i) {
                auto pos = position_of(scene.objects[i]);
                if (!pos || pos->col >= anchor_col) continue;
                long long size = std::get<long long>(*attr(scene.objects[i], "size"));
                if (size > best) {
                    best = size;
                    hits.assign(1, static_cast<int>(i));
                } else if (size == best) {
                    hits.push_back(i);
                }
            }
            break;
        }
        case QuestionTemplate::color_shape: {
            std::string color = scene.meta.at("color").get<std::string>();
            std::string shape = scene.meta.at("shape").get<std::string>();
            for (std::size_t i = 0; i < scene.objects.size(); ++i)
                if (str(scene.objects[i], "color") == color &&
                    str(scene.objects[i], "shape") == shape)
                    hits.push_back(i);
            break;
        }
    }
    return hits.size() == 1 ? hits[0] : -1;
}

}  // namespace

std::pair<Scene, GroundTruth> gen_logical3d(const std::vector<std::string>& shape_vocab,
                                            const std::vector<std::string>& color_vocab,
                                            const std::vector<std::string>& value_vocab,
                                            int n_objects, QuestionTemplate question_template,
                                            std::uint64_t seed, int max_attempts) {
    if (n_objects < 3)
        throw InfeasibleParams("logical3d needs at least 3 objects to express a relation");
    if (shape_vocab.empty() || color_vocab.empty() || value_vocab.empty())
        throw InfeasibleParams("logical3d vocabularies must be non-empty");

    Rng rng(seed);
    const int rows = 3;
    const int cols = std::max(3, n_objects);
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        Draft draft;
        bool ok = false;
        switch (question_template) {
            case QuestionTemplate::same_orientation:
                ok = draft_same_orientation(rng, color_vocab, value_vocab, n_objects, rows, cols,
                                            draft);
                break;
            case QuestionTemplate::left_of_larger:
                ok = draft_left_of_larger(rng, shape_vocab, color_vocab, n_objects, rows, draft);
                break;
            case QuestionTemplate::color_shape:
                ok = draft_color_shape(rng, shape_vocab, color_vocab, n_objects, rows, cols,
                                       draft);
                break;
        }
        if (!ok) break;  // structurally impossible for these vocabularies

        Scene scene;
        scene.kind = SceneKind::logical3d;
        scene.grid = GridSize{rows, cols};
        scene.question = draft.question;
        scene.meta["template"] = question_template_name(question_template);
        for (const auto& [key, value] : draft.meta.items()) scene.meta[key] = value;

        std::vector<int> order(draft.objects.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
        rng.shuffle(order);
        int target_at = -1;
        for (std::size_t i = 0; i < order.size(); ++i) {
            SceneObject obj = draft.objects[order[i]];
            obj.id = "obj" + std::to_string(i + 1);
            if (order[i] == draft.target_index) target_at = static_cast<int>(i);
            scene.objects.push_back(std::move(obj));
        }

        int scanned = scan_unique_target(scene, question_template);
        if (scanned < 0 || scanned != target_at) continue;

        GroundTruth truth;
        truth.kind = ActionKind::click;
        truth.object_id = scene.objects[scanned].id;
        return {std::move(scene), truth};
    }
    throw InfeasibleParams("logical3d generation failed to reach a unique satisfying object");
}

}  // namespace cdsl
