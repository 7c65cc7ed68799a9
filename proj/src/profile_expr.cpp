#include "skgs/profile_expr.hpp"

#include <cctype>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>

#include "skgs/error.hpp"

namespace skgs {
namespace {

struct Node {
    virtual ~Node() = default;
    virtual double eval(double x) const = 0;
};
using NodePtr = std::shared_ptr<const Node>;

struct Constant final : Node {
    double value;
    explicit Constant(double v) : value(v) {}
    double eval(double) const override { return value; }
};

struct Variable final : Node {
    double eval(double x) const override { return x; }
};

struct Unary final : Node {
    double (*fn)(double);
    NodePtr arg;
    Unary(double (*f)(double), NodePtr a) : fn(f), arg(std::move(a)) {}
    double eval(double x) const override { return fn(arg->eval(x)); }
};

struct Binary final : Node {
    char op;
    NodePtr lhs, rhs;
    Binary(char o, NodePtr l, NodePtr r) : op(o), lhs(std::move(l)), rhs(std::move(r)) {}
    double eval(double x) const override {
        const double l = lhs->eval(x);
        const double r = rhs->eval(x);
        switch (op) {
            case '+': return l + r;
            case '-': return l - r;
            case '*': return l * r;
            case '/': return l / r;
            default: return std::pow(l, r);
        }
    }
};

double neg(double v) { return -v; }
double sech(double v) { return 1.0 / std::cosh(v); }
double fabs_(double v) { return std::fabs(v); }

// expr   := term (('+'|'-') term)*
// term   := unary (('*'|'/') unary)*
// unary  := ('-'|'+') unary | power
// power  := atom ('^' unary)?
// atom   := number | name | name '(' expr ')' | '(' expr ')'
class Parser {
public:
    Parser(std::string_view src, const Grid1D& grid, bool allow_vars = true)
        : src_(src), grid_(grid), allow_vars_(allow_vars) {}

    NodePtr parse() {
        NodePtr n = expr();
        skip_ws();
        if (pos_ != src_.size()) fail("unexpected trailing input");
        return n;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw UsageError("profile expression '" + std::string(src_) + "': " + what +
                         " at offset " + std::to_string(pos_));
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+')) lhs = std::make_shared<Binary>('+', lhs, term());
            else if (accept('-')) lhs = std::make_shared<Binary>('-', lhs, term());
            else return lhs;
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            if (accept('*')) lhs = std::make_shared<Binary>('*', lhs, unary());
            else if (accept('/')) lhs = std::make_shared<Binary>('/', lhs, unary());
            else return lhs;
        }
    }

    NodePtr unary() {
        if (accept('-')) return std::make_shared<Unary>(&neg, unary());
        if (accept('+')) return unary();
        return power();
    }

    NodePtr power() {
        NodePtr base = atom();
        if (accept('^')) return std::make_shared<Binary>('^', base, unary());
        return base;
    }

    NodePtr atom() {
        skip_ws();
        if (pos_ >= src_.size()) fail("unexpected end of input");
        if (accept('(')) {
            NodePtr inner = expr();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return name();
        fail(std::string("unexpected character '") + c + "'");
    }

    NodePtr number() {
        const std::string rest(src_.substr(pos_));
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(rest, &used);
        } catch (const std::exception&) {
            fail("malformed number");
        }
        pos_ += used;
        return std::make_shared<Constant>(v);
    }

    NodePtr name() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                                      src_[pos_] == '_')) {
            ++pos_;
        }
        const std::string id(src_.substr(start, pos_ - start));
        if (!allow_vars_ && (id == "x" || id == "a" || id == "b")) {
            fail("'" + id + "' is not allowed in a constant expression");
        }
        if (id == "x") return std::make_shared<Variable>();
        if (id == "a") return std::make_shared<Constant>(grid_.a);
        if (id == "b") return std::make_shared<Constant>(grid_.b);
        if (id == "pi") return std::make_shared<Constant>(std::numbers::pi);
        if (id == "e") return std::make_shared<Constant>(std::numbers::e);

        double (*fn)(double) = nullptr;
        if (id == "sin") fn = [](double v) { return std::sin(v); };
        else if (id == "cos") fn = [](double v) { return std::cos(v); };
        else if (id == "tan") fn = [](double v) { return std::tan(v); };
        else if (id == "exp") fn = [](double v) { return std::exp(v); };
        else if (id == "log") fn = [](double v) { return std::log(v); };
        else if (id == "sqrt") fn = [](double v) { return std::sqrt(v); };
        else if (id == "abs") fn = &fabs_;
        else if (id == "sinh") fn = [](double v) { return std::sinh(v); };
        else if (id == "cosh") fn = [](double v) { return std::cosh(v); };
        else if (id == "tanh") fn = [](double v) { return std::tanh(v); };
        else if (id == "sech") fn = &sech;
        else fail("unknown name '" + id + "'");

        if (!accept('(')) fail("expected '(' after " + id);
        NodePtr arg = expr();
        if (!accept(')')) fail("expected ')'");
        return std::make_shared<Unary>(fn, arg);
    }

    std::string_view src_;
    const Grid1D& grid_;
    bool allow_vars_;
    std::size_t pos_ = 0;
};

}  // namespace

namespace {

std::string trim(std::string_view expr) {
    std::string trimmed(expr);
    while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back()))) {
        trimmed.pop_back();
    }
    while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.front()))) {
        trimmed.erase(trimmed.begin());
    }
    return trimmed;
}

}  // namespace

double parse_constant(std::string_view expr) {
    const std::string trimmed = trim(expr);
    if (trimmed.empty()) throw UsageError("empty numeric value");
    const Grid1D unit{};
    const double v = Parser(trimmed, unit, false).parse()->eval(0.0);
    if (!std::isfinite(v)) throw UsageError("numeric value '" + trimmed + "' is not finite");
    return v;
}

Profile parse_profile(std::string_view expr, const Grid1D& grid) {
    const std::string trimmed = trim(expr);
    if (trimmed.empty() || trimmed == "default") return default_noise_profile(grid);
    NodePtr root = Parser(trimmed, grid).parse();
    return [root](double x) { return root->eval(x); };
}

}  // namespace skgs
