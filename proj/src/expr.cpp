#include "srblab/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <algorithm>

#include "srblab/error.hpp"

namespace srblab {

class ExprParser {
public:
    explicit ExprParser(const std::string& src) : src_(src) {}

    Expression run() {
        Expression e;
        e.src_ = src_;
        parse_sum(e.code_);
        skip_ws();
        if (pos_ != src_.size())
            fail(Err::ConfigInvalid, "expression: trailing input at '" +
                                         src_.substr(pos_) + "'");
        if (e.code_.empty())
            fail(Err::ConfigInvalid, "expression: empty input");
        // Bound the evaluation stack (fixed-size in eval()).
        int depth = 0, peak = 0;
        for (const auto& in : e.code_) {
            switch (in.op) {
            case Op::Const: case Op::VarX: case Op::VarY: case Op::VarN:
                peak = std::max(peak, ++depth);
                break;
            case Op::Add: case Op::Sub: case Op::Mul: case Op::Div: case Op::Pow:
                --depth;
                break;
            default:
                break;
            }
        }
        if (peak > 60)
            fail(Err::ConfigInvalid, "expression: nesting too deep");
        return e;
    }

private:
    using Code = std::vector<Expression::Instr>;
    using Op = Expression::Op;

    void parse_sum(Code& out) {
        parse_term(out);
        for (;;) {
            skip_ws();
            if (consume('+')) { parse_term(out); out.push_back({Op::Add}); }
            else if (consume('-')) { parse_term(out); out.push_back({Op::Sub}); }
            else break;
        }
    }

    void parse_term(Code& out) {
        parse_unary(out);
        for (;;) {
            skip_ws();
            if (consume('*')) { parse_unary(out); out.push_back({Op::Mul}); }
            else if (consume('/')) { parse_unary(out); out.push_back({Op::Div}); }
            else break;
        }
    }

    void parse_unary(Code& out) {
        skip_ws();
        if (consume('-')) {
            parse_unary(out);
            out.push_back({Op::Neg});
            return;
        }
        parse_power(out);
    }

    void parse_power(Code& out) {
        parse_atom(out);
        skip_ws();
        if (consume('^')) {
            parse_unary(out); // right-associative, binds tighter than unary -
            out.push_back({Op::Pow});
        }
    }

    void parse_atom(Code& out) {
        skip_ws();
        if (pos_ >= src_.size())
            fail(Err::ConfigInvalid, "expression: unexpected end of input");
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            parse_sum(out);
            expect(')');
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            char* end = nullptr;
            const double v = std::strtod(src_.c_str() + pos_, &end);
            pos_ = static_cast<size_t>(end - src_.c_str());
            out.push_back({Op::Const, v});
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            size_t s = pos_;
            while (pos_ < src_.size() &&
                   std::isalpha(static_cast<unsigned char>(src_[pos_])))
                ++pos_;
            const std::string id = src_.substr(s, pos_ - s);
            if (id == "x") { out.push_back({Op::VarX}); return; }
            if (id == "y") { out.push_back({Op::VarY}); return; }
            if (id == "n") { out.push_back({Op::VarN}); return; }
            Op fn;
            if (id == "sin") fn = Op::Sin;
            else if (id == "cos") fn = Op::Cos;
            else if (id == "exp") fn = Op::Exp;
            else if (id == "log") fn = Op::Log;
            else if (id == "floor") fn = Op::Floor;
            else
                fail(Err::ConfigInvalid, "expression: unknown identifier '" + id + "'");
            expect('(');
            parse_sum(out);
            expect(')');
            out.push_back({fn});
            return;
        }
        fail(Err::ConfigInvalid, std::string("expression: unexpected character '") +
                                     c + "'");
    }

    void skip_ws() {
        while (pos_ < src_.size() &&
               std::isspace(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
    }

    bool consume(char c) {
        if (pos_ < src_.size() && src_[pos_] == c) { ++pos_; return true; }
        return false;
    }

    void expect(char c) {
        skip_ws();
        if (!consume(c))
            fail(Err::ConfigInvalid, std::string("expression: expected '") + c + "'");
    }

    const std::string& src_;
    size_t pos_ = 0;
};

Expression Expression::parse(const std::string& src) {
    return ExprParser(src).run();
}

double Expression::eval(double x, double y, double n) const {
    double stack[64];
    int top = -1;
    for (const Instr& in : code_) {
        switch (in.op) {
        case Op::Const: stack[++top] = in.value; break;
        case Op::VarX:  stack[++top] = x; break;
        case Op::VarY:  stack[++top] = y; break;
        case Op::VarN:  stack[++top] = n; break;
        case Op::Add:   --top; stack[top] += stack[top + 1]; break;
        case Op::Sub:   --top; stack[top] -= stack[top + 1]; break;
        case Op::Mul:   --top; stack[top] *= stack[top + 1]; break;
        case Op::Div:   --top; stack[top] /= stack[top + 1]; break;
        case Op::Pow:   --top; stack[top] = std::pow(stack[top], stack[top + 1]); break;
        case Op::Neg:   stack[top] = -stack[top]; break;
        case Op::Sin:   stack[top] = std::sin(stack[top]); break;
        case Op::Cos:   stack[top] = std::cos(stack[top]); break;
        case Op::Exp:   stack[top] = std::exp(stack[top]); break;
        case Op::Log:   stack[top] = std::log(stack[top]); break;
        case Op::Floor: stack[top] = std::floor(stack[top]); break;
        }
    }
    return stack[0];
}

} // namespace srblab
