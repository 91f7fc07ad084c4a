#include "prepay/errors.hpp"

namespace prepay {

void require(bool cond, const std::string& msg) {
    if (!cond) throw InputError(msg);
}

}  // namespace prepay
