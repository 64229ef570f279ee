#include "sepbell/types.hpp"

#include <limits>
#include <string>

#include "sepbell/errors.hpp"

namespace sepbell {

Index hilbert_dim(int num_sites, int dim) noexcept
{
    if (num_sites < 0 || dim < 1) {
        return 0;
    }
    Index total = 1;
    for (int n = 0; n < num_sites; ++n) {
        if (total > std::numeric_limits<Index>::max() / static_cast<Index>(dim)) {
            return 0;
        }
        total *= static_cast<Index>(dim);
    }
    return total;
}

Index checked_hilbert_dim(int num_sites, int dim, Index cap, const char* what)
{
    const Index total = hilbert_dim(num_sites, dim);
    if (total == 0 || total > cap) {
        throw Error(ErrorCode::SizeLimit,
                    std::string(what) + ": D^N = " + std::to_string(dim) + "^" +
                        std::to_string(num_sites) + " exceeds the size cap " + std::to_string(cap));
    }
    return total;
}

}  // namespace sepbell
