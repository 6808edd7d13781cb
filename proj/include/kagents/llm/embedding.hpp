#pragma once

#include <cstddef>
#include <string_view>

#include "kagents/llm/types.hpp"

namespace kagents::llm {

constexpr std::size_t kDefaultEmbeddingDim = 256;

// Hashed bag-of-words embedding, L2-normalised. Throws EmptyText when no token survives.
EmbeddingVector hashed_embedding(std::string_view text, std::size_t dim = kDefaultEmbeddingDim);

EmbeddingVector normalised(EmbeddingVector v);

} // namespace kagents::llm
