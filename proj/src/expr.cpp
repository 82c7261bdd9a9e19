#include "sdewalk/expr.hpp"

#include <cctype>
#include <cmath>
#include <charconv>
#include <cstdlib>
#include <utility>

#include "sdewalk/errors.hpp"

namespace sdewalk {

enum class Op { constant, var_t, var_x, add, sub, mul, div, neg, pow, exp, log, tanh };

struct Expr::Node {
    Op op = Op::constant;
    double value = 0.0;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

double eval_node(const Expr::Node& n, double t, double x) {
    switch (n.op) {
        case Op::constant: return n.value;
        case Op::var_t: return t;
        case Op::var_x: return x;
        case Op::add: return eval_node(*n.lhs, t, x) + eval_node(*n.rhs, t, x);
        case Op::sub: return eval_node(*n.lhs, t, x) - eval_node(*n.rhs, t, x);
        case Op::mul: return eval_node(*n.lhs, t, x) * eval_node(*n.rhs, t, x);
        case Op::div: return eval_node(*n.lhs, t, x) / eval_node(*n.rhs, t, x);
        case Op::neg: return -eval_node(*n.lhs, t, x);
        case Op::pow: return std::pow(eval_node(*n.lhs, t, x), eval_node(*n.rhs, t, x));
        case Op::exp: return std::exp(eval_node(*n.lhs, t, x));
        case Op::log: return std::log(eval_node(*n.lhs, t, x));
        case Op::tanh: return std::tanh(eval_node(*n.lhs, t, x));
    }
    return 0.0;
}

bool node_uses_time(const Expr::Node& n) {
    if (n.op == Op::var_t) return true;
    if (n.lhs && node_uses_time(*n.lhs)) return true;
    if (n.rhs && node_uses_time(*n.rhs)) return true;
    return false;
}

class Parser {
  public:
    explicit Parser(const std::string& text) : text_(text) {}

    NodePtr parse() {
        NodePtr e = expr();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return e;
    }

  private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("expression error at position " + std::to_string(pos_) + " in \"" +
                          text_ + "\": " + what);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    static NodePtr make(Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr, double v = 0.0) {
        auto n = std::make_shared<Expr::Node>();
        n->op = op;
        n->value = v;
        n->lhs = std::move(lhs);
        n->rhs = std::move(rhs);
        return n;
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (eat('+')) lhs = make(Op::add, lhs, term());
            else if (eat('-')) lhs = make(Op::sub, lhs, term());
            else return lhs;
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            if (eat('*')) lhs = make(Op::mul, lhs, unary());
            else if (eat('/')) lhs = make(Op::div, lhs, unary());
            else return lhs;
        }
    }

    NodePtr unary() {
        if (eat('-')) return make(Op::neg, unary());
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (eat('^')) return make(Op::pow, base, unary());
        return base;
    }

    NodePtr primary() {
        skip_ws();
        if (pos_ >= text_.size()) fail("expected a value");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr inner = expr();
            if (!eat(')')) fail("missing ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return name();
        fail(std::string("unexpected character '") + c + "'");
    }

    NodePtr number() {
        const char* begin = text_.c_str() + pos_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) fail("malformed number");
        pos_ += static_cast<std::size_t>(end - begin);
        return make(Op::constant, nullptr, nullptr, v);
    }

    NodePtr name() {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               std::isalpha(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        const std::string id = text_.substr(start, pos_ - start);
        if (id == "t") return make(Op::var_t);
        if (id == "x") return make(Op::var_x);

        Op op;
        if (id == "exp") op = Op::exp;
        else if (id == "log") op = Op::log;
        else if (id == "tanh") op = Op::tanh;
        else {
            pos_ = start;
            fail("unknown name \"" + id +
                 "\" (variables: t, x; functions: exp, log, tanh)");
        }
        if (!eat('(')) fail("expected '(' after function name");
        NodePtr arg = expr();
        if (!eat(')')) fail("missing ')'");
        return make(op, arg);
    }

    const std::string& text_;
    std::size_t pos_ = 0;
};

}  // namespace

double Expr::operator()(double t, double x) const {
    if (!root_) throw ConfigError("evaluating an empty expression");
    return eval_node(*root_, t, x);
}

Expr parse_expression(const std::string& text) {
    Expr e;
    e.root_ = Parser(text).parse();
    e.uses_time_ = node_uses_time(*e.root_);
    e.source_ = text;
    return e;
}

}  // namespace sdewalk
