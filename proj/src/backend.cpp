#include "osc/backend.hpp"

namespace osc {

void require_input_size(const Image& image, int side, int index) {
  if (image.width() == side && image.height() == side) return;
  std::string msg = "expected a " + std::to_string(side) + "x" + std::to_string(side) +
                    " input, got " + std::to_string(image.width()) + "x" +
                    std::to_string(image.height());
  if (index >= 0) msg = "batch member " + std::to_string(index) + ": " + msg;
  throw BackendError(msg, index);
}

}  // namespace osc
