#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace mcindex {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Thrown when a configuration hits the collision set (some mutual
/// distance below the configured floor).
class CollisionError : public std::runtime_error {
public:
    explicit CollisionError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when an iterative scheme fails to reach its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// Sign choice in the McGehee constants: total collision (T finite)
/// or completely parabolic (T infinite).
enum class Mode { collision, parabolic };

inline const char* mode_name(Mode m) { return m == Mode::collision ? "collision" : "parabolic"; }

} // namespace mcindex
