#include <algorithm>

#include "cdsl/generators.hpp"
#include "cdsl/rng.hpp"

namespace cdsl {

namespace {

struct Placement {
    std::string color;
    GridPos pos;
    bool is_outlier = false;
};

}  // namespace

std::pair<Scene, GroundTruth> gen_bingo(int rows, int cols,
                                        const std::vector<std::string>& colors, int line_length,
                                        bool adjacent_swap_only, std::uint64_t seed) {
    if (line_length < 3 || rows < line_length || cols < line_length)
        throw InfeasibleParams("bingo needs rows, cols >= line_length >= 3");
    if (colors.size() < 2)
        throw InfeasibleParams("bingo needs at least two colors; a monochrome board has no "
                               "unique single-move solution");

    Rng rng(seed);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        const std::string& target = rng.pick(colors);
        bool row_line = rng.chance(0.5);

        // The line window, its one empty interior cell, and the outlier that
        // fills it. The outlier shares the missing cell's cross coordinate so
        // an axis-alignment move lands exactly there; the gap is interior so
        // no second placement can complete a run some other way.
        std::vector<GridPos> window;
        GridPos missing, outlier_pos;
        if (row_line) {
            int r = static_cast<int>(rng.range(1, rows));
            int s = static_cast<int>(rng.range(1, cols - line_length + 1));
            for (int i = 0; i < line_length; ++i) window.push_back({r, s + i});
            missing = window[rng.range(1, line_length - 2)];
            std::vector<int> off_rows;
            for (int rr = 1; rr <= rows; ++rr)
                if (rr != r && (!adjacent_swap_only || std::abs(rr - r) == 1))
                    off_rows.push_back(rr);
            outlier_pos = {off_rows[rng.below(off_rows.size())], missing.col};
        } else {
            int c = static_cast<int>(rng.range(1, cols));
            int s = static_cast<int>(rng.range(1, rows - line_length + 1));
            for (int i = 0; i < line_length; ++i) window.push_back({s + i, c});
            missing = window[rng.range(1, line_length - 2)];
            std::vector<int> off_cols;
            for (int cc = 1; cc <= cols; ++cc)
                if (cc != c && (!adjacent_swap_only || std::abs(cc - c) == 1))
                    off_cols.push_back(cc);
            outlier_pos = {missing.row, off_cols[rng.below(off_cols.size())]};
        }

        std::vector<Placement> placed;
        for (const GridPos& cell : window)
            if (!(cell == missing)) placed.push_back({target, cell, false});
        placed.push_back({target, outlier_pos, true});

        auto occupied = [&](GridPos p) {
            if (p == missing) return true;  // the gap must stay empty
            for (const Placement& pl : placed)
                if (pl.pos == p) return true;
            return false;
        };

        // Distractor colors: at most line_length - 2 objects each (so one move
        // can never complete their line) with pairwise-distinct rows and
        // columns (so no axis ever shows a majority for them).
        std::vector<GridPos> free_cells;
        for (int r = 1; r <= rows; ++r)
            for (int c = 1; c <= cols; ++c)
                if (!occupied({r, c})) free_cells.push_back({r, c});
        rng.shuffle(free_cells);

        std::size_t cursor = 0;
        for (const std::string& color : colors) {
            if (color == target) continue;
            int want = static_cast<int>(rng.range(1, std::max(1, line_length - 2)));
            std::vector<int> used_rows, used_cols;
            for (int k = 0; k < want && cursor < free_cells.size(); ++cursor) {
                GridPos cell = free_cells[cursor];
                if (std::count(used_rows.begin(), used_rows.end(), cell.row) ||
                    std::count(used_cols.begin(), used_cols.end(), cell.col))
                    continue;
                placed.push_back({color, cell, false});
                used_rows.push_back(cell.row);
                used_cols.push_back(cell.col);
                ++k;
            }
        }

        rng.shuffle(placed);
        Scene scene;
        scene.kind = SceneKind::bingo;
        scene.grid = GridSize{rows, cols};
        scene.question = "Line up " + std::to_string(line_length) +
                         " identical items in a row or column by moving one item.";
        scene.meta["adjacent_only"] = adjacent_swap_only;
        scene.meta["line_axis"] = row_line ? "row" : "col";
        scene.meta["line_length"] = line_length;
        scene.meta["swap_allowed"] = true;
        scene.meta["target_color"] = target;
        std::string outlier_id;
        for (std::size_t i = 0; i < placed.size(); ++i) {
            SceneObject obj;
            obj.id = "obj" + std::to_string(i + 1);
            obj.attrs["color"] = placed[i].color;
            obj.attrs["pos"] = placed[i].pos;
            if (placed[i].is_outlier) outlier_id = obj.id;
            scene.objects.push_back(std::move(obj));
        }

        GroundTruth truth;
        truth.kind = ActionKind::move;
        truth.object_id = outlier_id;
        truth.to = missing;

        std::vector<Action> moves = completing_moves(scene);
        if (moves.size() == 1 && moves[0].object_id == outlier_id && moves[0].to == missing)
            return {std::move(scene), truth};
    }
    throw InfeasibleParams("bingo generation failed to reach a unique single-move solution");
}

}  // namespace cdsl
