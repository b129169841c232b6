#include "volalab/errors.hpp"

namespace volalab {

NumericDegeneracy::NumericDegeneracy(const std::string& what, std::size_t step)
    : std::runtime_error(what + " (t=" + std::to_string(step) + ")"), step_(step) {}

SimulationExplosion::SimulationExplosion(const std::string& what, std::size_t step)
    : std::runtime_error(what + " (step " + std::to_string(step) + ")"), step_(step) {}

IllConditioned::IllConditioned(const std::string& what, double condition_number)
    : std::runtime_error(what + " (condition number " + std::to_string(condition_number) + ")"),
      cond_(condition_number) {}

} // namespace volalab
