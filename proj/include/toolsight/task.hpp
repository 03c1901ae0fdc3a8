#pragma once

#include <string>

#include "toolsight/errors.hpp"

namespace toolsight {

/// Task I: binary Yes/No about a classic illusion image.
/// Task II: four-way multiple choice about real-world anomalies.
enum class TaskKind { TaskI, TaskII };

inline std::string task_name(TaskKind t) { return t == TaskKind::TaskI ? "task1" : "task2"; }

inline TaskKind task_from_int(int v) {
    if (v == 1) return TaskKind::TaskI;
    if (v == 2) return TaskKind::TaskII;
    throw ConfigError("task must be 1 or 2");
}

/// Structured verdict. Task I carries "Yes"/"No", Task II one of "A".."D".
struct FinalAnswer {
    TaskKind task = TaskKind::TaskI;
    std::string verdict;
    std::string rationale;

    bool operator==(const FinalAnswer&) const = default;

    static FinalAnswer yes_no(bool yes, std::string rationale = {}) {
        return {TaskKind::TaskI, yes ? "Yes" : "No", std::move(rationale)};
    }
    static FinalAnswer choice(char c, std::string rationale = {}) {
        if (c < 'A' || c > 'D') throw ConfigError("choice must be A..D");
        return {TaskKind::TaskII, std::string(1, c), std::move(rationale)};
    }
};

inline bool verdict_legal(TaskKind task, const std::string& v) {
    if (task == TaskKind::TaskI) return v == "Yes" || v == "No";
    return v.size() == 1 && v[0] >= 'A' && v[0] <= 'D';
}

}  // namespace toolsight
