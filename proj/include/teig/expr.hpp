#pragma once

#include <memory>
#include <string>

namespace teig {

// Arithmetic expressions in the variables x and y with +, -, *, /, ^ and
// parentheses; enough to describe the coefficient fields accepted in run
// configurations without pulling in a general interpreter.
class Expr {
public:
    struct Node;

    double eval(double x, double y) const;
    const std::string& text() const { return text_; }

    // Throws std::invalid_argument with a position-annotated message.
    static Expr parse(const std::string& text);

private:
    std::shared_ptr<const Node> root_;
    std::string text_;
};

}  // namespace teig
