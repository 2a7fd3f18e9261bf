#include <cstdlib>
#include <string>

#include "goldlab/errors.hpp"
#include "goldlab/kernels.hpp"

namespace goldlab::kernels {
namespace {

const Ops* resolve(const std::string& name) {
    if (name == "scalar") return &scalar();
    if (name == "avx2") {
        const Ops* ops = avx2();
        if (!ops) throw ConfigError("kernel variant 'avx2' not available on this host");
        return ops;
    }
    if (name == "auto" || name.empty()) {
        const Ops* ops = avx2();
        return ops ? ops : &scalar();
    }
    throw ConfigError("unknown kernel variant '" + name + "' (want scalar|avx2|auto)");
}

const Ops*& selected() {
    static const Ops* ops = [] {
        const char* env = std::getenv("GOLDLAB_KERNELS");
        return resolve(env ? env : "auto");
    }();
    return ops;
}

}  // namespace

const Ops& active() { return *selected(); }

void select(const std::string& name) { selected() = resolve(name); }

}  // namespace goldlab::kernels
