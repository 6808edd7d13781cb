#include "kagents/execution/call_script.hpp"

#include <cctype>
#include <set>

#include "kagents/errors.hpp"
#include "kagents/text.hpp"

namespace kagents::execution {

using nlohmann::json;

namespace {

enum class Tok { ident, number, string, lparen, rparen, lbracket, rbracket, comma, equals, newline, end };

struct Token {
    Tok kind;
    std::string text;
    std::size_t line;
    std::size_t column;
};

std::vector<Token> tokenize(const std::string& s) {
    std::vector<Token> out;
    std::size_t line = 1, col = 1, i = 0;
    int depth = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n && i < s.size(); ++k, ++i) {
            if (s[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < s.size()) {
        char c = s[i];
        std::size_t l = line, cl = col;
        if (c == '\n') {
            if (depth == 0) out.push_back({Tok::newline, "\n", l, cl});
            advance(1);
        } else if (c == ' ' || c == '\t' || c == '\r') {
            advance(1);
        } else if (c == '#') {
            while (i < s.size() && s[i] != '\n') advance(1);
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
            out.push_back({Tok::ident, s.substr(i, j - i), l, cl});
            advance(j - i);
        } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' ||
                   ((c == '-' || c == '+') && i + 1 < s.size() &&
                    (std::isdigit(static_cast<unsigned char>(s[i + 1])) || s[i + 1] == '.'))) {
            std::size_t j = i + 1;
            while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '.')) ++j;
            if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
                if (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
                    j = k;
                    while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
                }
            }
            std::string num = s.substr(i, j - i);
            try {
                std::size_t used = 0;
                std::stod(num, &used);
                if (used != num.size()) throw std::invalid_argument(num);
            } catch (const std::exception&) {
                throw GrammarError("malformed number '" + num + "'", l, cl);
            }
            out.push_back({Tok::number, num, l, cl});
            advance(j - i);
        } else if (c == '"' || c == '\'') {
            std::string value;
            std::size_t j = i + 1;
            bool closed = false;
            while (j < s.size()) {
                if (s[j] == '\\' && j + 1 < s.size()) {
                    char e = s[j + 1];
                    value.push_back(e == 'n' ? '\n' : e == 't' ? '\t' : e);
                    j += 2;
                } else if (s[j] == c) {
                    closed = true;
                    break;
                } else if (s[j] == '\n') {
                    break;
                } else {
                    value.push_back(s[j++]);
                }
            }
            if (!closed) throw GrammarError("unterminated string", l, cl);
            out.push_back({Tok::string, value, l, cl});
            advance(j + 1 - i);
        } else {
            Tok k;
            switch (c) {
            case '(': k = Tok::lparen; ++depth; break;
            case ')': k = Tok::rparen; --depth; break;
            case '[': k = Tok::lbracket; ++depth; break;
            case ']': k = Tok::rbracket; --depth; break;
            case ',': k = Tok::comma; break;
            case '=': k = Tok::equals; break;
            default: throw GrammarError(std::string("unexpected character '") + c + "'", l, cl);
            }
            if (depth < 0) throw GrammarError("unbalanced closing bracket", l, cl);
            out.push_back({k, std::string(1, c), l, cl});
            advance(1);
        }
    }
    out.push_back({Tok::end, "", line, col});
    return out;
}

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : t_(std::move(toks)) {}

    CallPlan parse() {
        CallPlan plan;
        bool have_call = false;
        skip_newlines();
        while (peek().kind != Tok::end) {
            if (have_call) fail("the experiment call must be the last line");
            Token name = expect(Tok::ident, "a name");
            expect(Tok::equals, "'='");
            if (peek().kind == Tok::ident && peek(1).kind == Tok::lparen) {
                if (name.text.rfind("experiment_", 0) != 0 || name.text.size() == 11)
                    throw GrammarError("the call result must be bound to experiment_<id>", name.line, name.column);
                plan.result_binding = name.text;
                plan.experiment_name = next().text;
                next(); // (
                parse_arguments(plan);
                have_call = true;
            } else {
                plan.assignments.emplace_back(name.text, value());
            }
            if (peek().kind != Tok::end) expect(Tok::newline, "end of line");
            skip_newlines();
        }
        if (!have_call) {
            const Token& e = peek();
            throw GrammarError("missing final line experiment_<id> = <Experiment>(...)", e.line, e.column);
        }
        return plan;
    }

private:
    void parse_arguments(CallPlan& plan) {
        std::set<std::string> seen;
        if (peek().kind == Tok::rparen) {
            next();
            return;
        }
        while (true) {
            Token k = expect(Tok::ident, "an argument name");
            if (!seen.insert(k.text).second) throw GrammarError("duplicate argument '" + k.text + "'", k.line, k.column);
            expect(Tok::equals, "'='");
            plan.arguments.push_back({k.text, value()});
            if (peek().kind == Tok::comma) {
                next();
                if (peek().kind == Tok::rparen) {
                    next();
                    return;
                }
                continue;
            }
            expect(Tok::rparen, "',' or ')'");
            return;
        }
    }

    Value value(bool in_list = false) {
        const Token& tk = peek();
        Value v;
        switch (tk.kind) {
        case Tok::number: {
            std::string s = next().text;
            bool integral = s.find_first_of(".eE") == std::string::npos;
            if (integral) {
                try {
                    v.literal = std::stoll(s);
                    return v;
                } catch (const std::exception&) {
                }
            }
            v.literal = std::stod(s);
            return v;
        }
        case Tok::string: v.literal = next().text; return v;
        case Tok::ident: {
            std::string s = next().text;
            if (s == "True" || s == "true") v.literal = true;
            else if (s == "False" || s == "false") v.literal = false;
            else {
                v.kind = Value::Kind::ref;
                v.ref = s;
            }
            return v;
        }
        case Tok::lbracket: {
            if (in_list) fail("nested lists are not allowed");
            next();
            v.kind = Value::Kind::list;
            if (peek().kind == Tok::rbracket) {
                next();
                return v;
            }
            while (true) {
                v.items.push_back(value(true));
                if (peek().kind == Tok::comma) {
                    next();
                    if (peek().kind == Tok::rbracket) break;
                    continue;
                }
                break;
            }
            expect(Tok::rbracket, "',' or ']'");
            return v;
        }
        default: fail("expected a value");
        }
        return v;
    }

    const Token& peek(std::size_t ahead = 0) const {
        return t_[std::min(pos_ + ahead, t_.size() - 1)];
    }
    Token next() { return t_[std::min(pos_++, t_.size() - 1)]; }
    Token expect(Tok kind, const std::string& what) {
        if (peek().kind != kind) fail("expected " + what);
        return next();
    }
    void skip_newlines() {
        while (peek().kind == Tok::newline) next();
    }
    [[noreturn]] void fail(const std::string& what) const {
        const Token& tk = peek();
        std::string got = tk.kind == Tok::end ? "end of input" : tk.kind == Tok::newline ? "end of line" : "'" + tk.text + "'";
        throw GrammarError(what + ", found " + got, tk.line, tk.column);
    }

    std::vector<Token> t_;
    std::size_t pos_ = 0;
};

json resolve(const Value& v, const std::map<std::string, json>& local, const VariableTable& table) {
    switch (v.kind) {
    case Value::Kind::literal: return v.literal;
    case Value::Kind::ref: {
        auto it = local.find(v.ref);
        if (it != local.end()) return it->second;
        return table.get(v.ref).value;
    }
    case Value::Kind::list: {
        json out = json::array();
        for (const auto& item : v.items) out.push_back(resolve(item, local, table));
        return out;
    }
    }
    return nullptr;
}

} // namespace

CallPlan parse_call_script(const std::string& text) { return Parser(tokenize(text)).parse(); }

BoundCall bind_call(const CallPlan& plan, const knowledge::Registry& registry, const VariableTable& table) {
    const knowledge::ExperimentDescriptor* d = registry.find(plan.experiment_name);
    if (!d) throw UnknownExperiment("no experiment named '" + plan.experiment_name + "'");
    std::map<std::string, json> local;
    for (const auto& [name, v] : plan.assignments) local[name] = resolve(v, local, table);
    BoundCall out;
    out.experiment = d->name;
    out.result_binding = plan.result_binding;
    for (const auto& a : plan.arguments) {
        if (!d->parameter(a.name))
            throw UnknownParameter(d->name + " has no parameter '" + a.name + "'");
        out.arguments[a.name] = resolve(a.value, local, table);
    }
    for (const auto& p : d->parameters) {
        if (out.arguments.contains(p.name)) continue;
        if (p.default_value) out.arguments[p.name] = *p.default_value;
        else if (p.required) throw MissingArgument(d->name + " needs a value for '" + p.name + "'");
    }
    return out;
}

BoundCall parse_and_bind(const std::string& text, const knowledge::Registry& registry, const VariableTable& table) {
    return bind_call(parse_call_script(text), registry, table);
}

std::string render(const Value& v) {
    switch (v.kind) {
    case Value::Kind::literal: return v.literal.dump();
    case Value::Kind::ref: return v.ref;
    case Value::Kind::list: {
        std::vector<std::string> parts;
        for (const auto& i : v.items) parts.push_back(render(i));
        return "[" + text::join(parts, ", ") + "]";
    }
    }
    return {};
}

} // namespace kagents::execution
