#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace ucpe {

/// Input rejected by a precondition check (bad counts, ratings out of range,
/// malformed files). Maps to CLI exit code 1.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A pipeline stage failed; `stage()` names which one.
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const std::string& what)
        : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

/// A cross-validation fold could not be built or evaluated.
class FoldError : public std::runtime_error {
public:
    FoldError(std::size_t fold, const std::string& what)
        : std::runtime_error("fold " + std::to_string(fold) + ": " + what), fold_(fold) {}

    std::size_t fold() const noexcept { return fold_; }

private:
    std::size_t fold_;
};

/// Model artifact could not be read; `section()` names the offending part.
class ArtifactError : public std::runtime_error {
public:
    ArtifactError(std::string section, const std::string& what)
        : std::runtime_error("artifact section '" + section + "': " + what), section_(std::move(section)) {}

    const std::string& section() const noexcept { return section_; }

private:
    std::string section_;
};

}  // namespace ucpe
