#pragma once

#include <string>

#include "lod/corrector.hpp"

namespace lod {

/// Binary basis cache, see docs/basis-format.md.
template <class S>
void write_basis(const std::string& path, const LodBasis<S>& basis);

/// Throws std::runtime_error on a malformed file or a scalar kind mismatch.
template <class S>
LodBasis<S> read_basis(const std::string& path);

}  // namespace lod
