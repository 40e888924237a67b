#include "mismatchlab/errors.hpp"

namespace mismatchlab {

void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidParameter(what);
}

}  // namespace mismatchlab
