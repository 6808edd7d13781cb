#pragma once

#include <string>

namespace kagents::inspection {

enum class Verdict { success, failure, inconclusive };

std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

} // namespace kagents::inspection
