// Arithmetic expressions for config-defined branch formulas. The grammar is
// deliberately small: +, -, *, /, ^ (right-associative), unary minus, the
// functions sin, cos, exp, log, floor, numeric literals, and the variables
// x, y, n (n is the branch index). Parsing compiles to a flat RPN program.
#pragma once

#include <string>
#include <vector>

namespace srblab {

class Expression {
public:
    Expression() = default;

    // Throws ConfigInvalid on any syntax error or unknown identifier.
    static Expression parse(const std::string& src);

    double eval(double x, double y, double n) const;

    const std::string& source() const { return src_; }
    bool empty() const { return code_.empty(); }

private:
    enum class Op : unsigned char {
        Const, VarX, VarY, VarN,
        Add, Sub, Mul, Div, Pow, Neg,
        Sin, Cos, Exp, Log, Floor,
    };

    struct Instr {
        Op op;
        double value = 0.0;
    };

    std::vector<Instr> code_;
    std::string src_;

    friend class ExprParser;
};

} // namespace srblab
