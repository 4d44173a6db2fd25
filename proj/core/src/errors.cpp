#include "psd/errors.hpp"

namespace psd {

int exit_code_for(const std::exception& e) noexcept {
  if (dynamic_cast<const NumericalError*>(&e) != nullptr) return 2;
  return 1;
}

}  // namespace psd
