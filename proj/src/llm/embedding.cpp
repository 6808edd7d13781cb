#include "kagents/llm/embedding.hpp"

#include <cmath>
#include <cstdint>

#include "kagents/errors.hpp"
#include "kagents/text.hpp"

namespace kagents::llm {

namespace {

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace

EmbeddingVector hashed_embedding(std::string_view input, std::size_t dim) {
    if (dim == 0) throw std::invalid_argument("embedding dimension must be positive");
    EmbeddingVector v;
    v.values.assign(dim, 0.0);
    bool any = false;
    for (const auto& w : text::words(input)) {
        v.values[fnv1a(text::stem(w)) % dim] += 1.0;
        any = true;
    }
    if (!any) throw EmptyText("text has no tokens to embed");
    return normalised(std::move(v));
}

EmbeddingVector normalised(EmbeddingVector v) {
    double n = v.norm();
    if (n > 0.0)
        for (double& x : v.values) x /= n;
    return v;
}

} // namespace kagents::llm
