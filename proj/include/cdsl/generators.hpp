// Seeded scene generators for the three challenge categories. Each generator
// is deterministic in (params, seed), guarantees exactly one correct answer,
// and returns that answer as the ground truth.
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cdsl/scene.hpp"

namespace cdsl {

// Board with one outlier whose single legal move completes a line of
// line_length same-colored items; every other single move is confirmed
// non-completing by brute force before the scene is returned.
std::pair<Scene, GroundTruth> gen_bingo(int rows, int cols,
                                        const std::vector<std::string>& colors, int line_length,
                                        bool adjacent_swap_only, std::uint64_t seed);

// Subject and reference at distinct multiples of degree_step; the task is to
// rotate the subject to the reference orientation, accepted within
// degree_step / 2.
std::pair<Scene, GroundTruth> gen_rotation(const std::vector<std::string>& object_types,
                                           const std::vector<std::string>& reference_kinds,
                                           int degree_step, std::uint64_t seed);

enum class QuestionTemplate { same_orientation, left_of_larger, color_shape };

const char* question_template_name(QuestionTemplate t);
QuestionTemplate question_template_from_name(const std::string& name);

// Relational click task; exactly one object satisfies the instantiated
// question (enforced by rejection sampling, bounded by max_attempts).
//
// Template conventions:
// - same_orientation: value_vocab[0] is the candidate value, value_vocab[1]
//   the reference value; further entries fill the scene.
// - left_of_larger: color_vocab[0] is the anchor color.
std::pair<Scene, GroundTruth> gen_logical3d(const std::vector<std::string>& shape_vocab,
                                            const std::vector<std::string>& color_vocab,
                                            const std::vector<std::string>& value_vocab,
                                            int n_objects, QuestionTemplate question_template,
                                            std::uint64_t seed, int max_attempts = 1000);

}  // namespace cdsl
