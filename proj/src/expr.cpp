#include "teig/expr.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace teig {

struct Expr::Node {
    enum class Op { constant, var_x, var_y, add, sub, mul, div, pow, neg };
    Op op;
    double value = 0.0;
    std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    NodePtr parse() {
        NodePtr e = sum();
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    const std::string& s_;
    size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw std::invalid_argument("expression error at position " + std::to_string(pos_ + 1) +
                                    " in \"" + s_ + "\": " + what);
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool consume(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    static NodePtr make(Expr::Node::Op op, NodePtr l = nullptr, NodePtr r = nullptr, double v = 0.0) {
        auto n = std::make_shared<Expr::Node>();
        n->op = op;
        n->value = v;
        n->lhs = std::move(l);
        n->rhs = std::move(r);
        return n;
    }

    NodePtr sum() {
        NodePtr e = product();
        for (;;) {
            if (consume('+'))
                e = make(Expr::Node::Op::add, e, product());
            else if (consume('-'))
                e = make(Expr::Node::Op::sub, e, product());
            else
                return e;
        }
    }

    NodePtr product() {
        NodePtr e = unary();
        for (;;) {
            if (consume('*'))
                e = make(Expr::Node::Op::mul, e, unary());
            else if (consume('/'))
                e = make(Expr::Node::Op::div, e, unary());
            else
                return e;
        }
    }

    NodePtr unary() {
        if (consume('-')) return make(Expr::Node::Op::neg, unary());
        if (consume('+')) return unary();
        return power();
    }

    NodePtr power() {
        NodePtr base = atom();
        if (consume('^')) return make(Expr::Node::Op::pow, base, unary());  // right-assoc
        return base;
    }

    NodePtr atom() {
        skip_ws();
        if (pos_ >= s_.size()) fail("expected operand");
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = sum();
            if (!consume(')')) fail("missing closing parenthesis");
            return e;
        }
        if (c == 'x' || c == 'y') {
            ++pos_;
            skip_ws();
            if (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_])))
                fail("only the variables x and y are supported");
            return make(c == 'x' ? Expr::Node::Op::var_x : Expr::Node::Op::var_y);
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(s_.substr(pos_), &used);
            } catch (const std::exception&) {
                fail("malformed number");
            }
            pos_ += used;
            return make(Expr::Node::Op::constant, nullptr, nullptr, v);
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

double eval_node(const Expr::Node& n, double x, double y) {
    using Op = Expr::Node::Op;
    switch (n.op) {
        case Op::constant: return n.value;
        case Op::var_x: return x;
        case Op::var_y: return y;
        case Op::add: return eval_node(*n.lhs, x, y) + eval_node(*n.rhs, x, y);
        case Op::sub: return eval_node(*n.lhs, x, y) - eval_node(*n.rhs, x, y);
        case Op::mul: return eval_node(*n.lhs, x, y) * eval_node(*n.rhs, x, y);
        case Op::div: return eval_node(*n.lhs, x, y) / eval_node(*n.rhs, x, y);
        case Op::pow: return std::pow(eval_node(*n.lhs, x, y), eval_node(*n.rhs, x, y));
        case Op::neg: return -eval_node(*n.lhs, x, y);
    }
    return 0.0;
}

}  // namespace

double Expr::eval(double x, double y) const { return eval_node(*root_, x, y); }

Expr Expr::parse(const std::string& text) {
    Expr e;
    e.root_ = Parser(text).parse();
    e.text_ = text;
    return e;
}

}  // namespace teig
