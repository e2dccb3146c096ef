#include "dwfloquet/errors.hpp"
#include "dwfloquet/params.hpp"

#include <sstream>

namespace dwf {

void SystemParams::validate() const {
    if (!(D > 0.0) || !std::isfinite(D)) {
        throw InvalidArgument("barrier height D must be positive");
    }
    if (!(omega > 0.0) || !std::isfinite(omega)) {
        throw InvalidArgument("driving frequency omega must be positive");
    }
    if (!(S >= 0.0) || !std::isfinite(S)) {
        std::ostringstream os;
        os << "driving amplitude must be >= 0 (got S=" << S << ")";
        throw InvalidArgument(os.str());
    }
}

} // namespace dwf
