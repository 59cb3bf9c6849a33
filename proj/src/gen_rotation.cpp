#include "cdsl/generators.hpp"
#include "cdsl/rng.hpp"

namespace cdsl {

std::pair<Scene, GroundTruth> gen_rotation(const std::vector<std::string>& object_types,
                                           const std::vector<std::string>& reference_kinds,
                                           int degree_step, std::uint64_t seed) {
    if (object_types.empty() || reference_kinds.empty())
        throw InfeasibleParams("rotation needs non-empty object and reference vocabularies");
    if (degree_step <= 0 || degree_step >= 360 || 360 % degree_step != 0)
        throw InfeasibleParams("degree_step must divide 360 and be smaller than it");

    Rng rng(seed);
    int steps = 360 / degree_step;
    const std::string& subject_type = rng.pick(object_types);
    const std::string& reference_kind = rng.pick(reference_kinds);
    int ref_idx = static_cast<int>(rng.below(steps));
    // always a different multiple: the task is never a no-op
    int subj_idx = static_cast<int>((ref_idx + 1 + rng.below(steps - 1)) % steps);

    SceneObject subject;
    subject.attrs["orientation"] = Orientation{static_cast<double>(subj_idx * degree_step)};
    subject.attrs["role"] = std::string("subject");
    subject.attrs["type"] = subject_type;

    SceneObject reference;
    reference.attrs["orientation"] = Orientation{static_cast<double>(ref_idx * degree_step)};
    reference.attrs["role"] = std::string("reference");
    reference.attrs["type"] = reference_kind;

    Scene scene;
    scene.kind = SceneKind::rotation;
    scene.question = "Rotate the " + subject_type + " to match the orientation of the " +
                     reference_kind + ".";
    scene.meta["degree_step"] = degree_step;
    scene.objects.push_back(std::move(subject));
    scene.objects.push_back(std::move(reference));
    if (rng.chance(0.5)) std::swap(scene.objects[0], scene.objects[1]);
    for (std::size_t i = 0; i < scene.objects.size(); ++i)
        scene.objects[i].id = "obj" + std::to_string(i + 1);

    GroundTruth truth;
    truth.kind = ActionKind::rotate;
    truth.target_degrees = ref_idx * degree_step;
    truth.tolerance = degree_step / 2.0;
    return {std::move(scene), truth};
}

}  // namespace cdsl
