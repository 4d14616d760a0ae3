#include "starcalc/expr.hpp"

#include <cctype>
#include <charconv>
#include <numbers>

namespace starcalc::expr {

namespace {

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0)
            out += ", ";
        out += items[i];
    }
    return out;
}

bool is_function(std::string_view name) { return name == "exp" || name == "log" || name == "sqrt"; }

class Parser {
public:
    Parser(std::string_view text, const Bindings& bindings) : src_(text), bindings_(bindings) {}

    Expression parse_all() {
        Expression e = parse_expr();
        skip_ws();
        if (pos_ != src_.size())
            fail({"+", "-", "*", "/", "^", "end of input"});
        return e;
    }

private:
    std::string_view src_;
    const Bindings& bindings_;
    std::size_t pos_ = 0;
    int depth_ = 0;

    [[noreturn]] void fail(std::vector<std::string> expected) const {
        std::string found = pos_ < src_.size() ? "'" + std::string(1, src_[pos_]) + "'" : "end of input";
        throw ParseError(pos_, expected,
                         "parse error at offset " + std::to_string(pos_) + ": found " + found +
                             ", expected one of: " + join(expected));
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Expression parse_expr() {
        Expression lhs = parse_term();
        for (;;) {
            if (accept('+'))
                lhs = add(lhs, parse_term());
            else if (accept('-'))
                lhs = sub(lhs, parse_term());
            else
                return lhs;
        }
    }

    Expression parse_term() {
        Expression lhs = parse_unary();
        for (;;) {
            if (accept('*'))
                lhs = mul(lhs, parse_unary());
            else if (accept('/'))
                lhs = div(lhs, parse_unary());
            else
                return lhs;
        }
    }

    Expression parse_unary() {
        if (accept('-'))
            return neg(parse_unary());
        return parse_power();
    }

    Expression parse_power() {
        Expression base = parse_atom();
        if (accept('^'))
            return pow(base, parse_unary());
        return base;
    }

    std::vector<std::string> atom_starts() const {
        std::vector<std::string> out{"number", "x", "e", "pi", "exp", "log", "sqrt", "(", "-"};
        for (const auto& [name, value] : bindings_)
            out.push_back(name);
        return out;
    }

    Expression parse_atom() {
        skip_ws();
        if (pos_ >= src_.size())
            fail(atom_starts());
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            if (++depth_ > 256)
                fail({"shallower nesting"});
            Expression inner = parse_expr();
            --depth_;
            if (!accept(')'))
                fail({")", "+", "-", "*", "/", "^"});
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
            return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
            return parse_identifier();
        fail(atom_starts());
    }

    Expression parse_number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                ++pos_;
                ++n;
            }
            return n;
        };
        std::size_t n = digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            n += digits();
        }
        if (n == 0) {
            pos_ = start;
            fail({"number"});
        }
        // An exponent suffix only counts when digits follow; "2e" is 2 then e.
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t look = pos_ + 1;
            if (look < src_.size() && (src_[look] == '+' || src_[look] == '-'))
                ++look;
            if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
                pos_ = look;
                digits();
            }
        }
        double v = 0.0;
        const auto res = std::from_chars(src_.data() + start, src_.data() + pos_, v);
        if (res.ec != std::errc() || res.ptr != src_.data() + pos_) {
            pos_ = start;
            fail({"finite number"});
        }
        return constant(v);
    }

    Expression parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        const std::string_view name = src_.substr(start, pos_ - start);
        if (is_function(name)) {
            if (!accept('('))
                fail({"("});
            Expression arg = parse_expr();
            if (!accept(')'))
                fail({")", "+", "-", "*", "/", "^"});
            if (name == "exp")
                return exp(arg);
            if (name == "log")
                return log(arg);
            return sqrt(arg);
        }
        if (name == "x")
            return variable();
        if (auto it = bindings_.find(name); it != bindings_.end())
            return constant(it->second);
        if (name == "e")
            return constant(std::numbers::e);
        if (name == "pi")
            return constant(std::numbers::pi);
        pos_ = start;
        fail(atom_starts());
    }
};

} // namespace

ParseError::ParseError(std::size_t offset, std::vector<std::string> expected, const std::string& what)
    : Error(what), offset_(offset), expected_(std::move(expected)) {}

Expression parse(std::string_view text, const Bindings& bindings) {
    return Parser(text, bindings).parse_all();
}

} // namespace starcalc::expr
