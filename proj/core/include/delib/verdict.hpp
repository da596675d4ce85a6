#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace delib {

// Dataset-side binary label.
enum class Label { SUPPORT, REFUTE };

// Panel-side three-way verdict.
enum class Verdict { SUPPORTED, NOT_SUPPORTED, INCONCLUSIVE };

std::string to_string(Label label);
std::string to_string(Verdict verdict);

std::optional<Label> label_from_string(std::string_view text);

// Tolerant parse: case-insensitive, accepts "NOT SUPPORTED", "NOT_SUPPORTED"
// and "not-supported" spellings.
std::optional<Verdict> verdict_from_string(std::string_view text);

// Burden-of-refutation mapping: SUPPORTED -> SUPPORT, NOT_SUPPORTED -> REFUTE,
// INCONCLUSIVE -> SUPPORT (a claim that survives adversarial scrutiny stands).
Label map_label(Verdict verdict);

}  // namespace delib
