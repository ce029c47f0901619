#pragma once

// Tiny arithmetic-expression compiler used to define delay maps on the
// command line, e.g. "x1*exp(2-x0)+1" with variables x0..x{k-1} bound to the
// map arguments newest first.  Supports + - * /, unary minus, parentheses,
// '^' and the functions pow, exp, log.  Parsed once into a flat node list.

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynamics.hpp"

namespace delaystab {

namespace expr_detail {

enum class Op { Const, Var, Add, Sub, Mul, Div, Neg, Pow, Exp, Log };

struct Node {
    Op op;
    double value = 0.0;  // Const
    int var = 0;         // Var
    int a = -1, b = -1;  // operand node indices
};

struct Program {
    std::vector<Node> nodes;
    int root = -1;

    double eval(std::span<const double> args) const {
        return eval_node(root, args);
    }

  private:
    double eval_node(int idx, std::span<const double>& args) const {
        const Node& n = nodes[static_cast<std::size_t>(idx)];
        switch (n.op) {
            case Op::Const: return n.value;
            case Op::Var: return args[static_cast<std::size_t>(n.var)];
            case Op::Add: return eval_node(n.a, args) + eval_node(n.b, args);
            case Op::Sub: return eval_node(n.a, args) - eval_node(n.b, args);
            case Op::Mul: return eval_node(n.a, args) * eval_node(n.b, args);
            case Op::Div: return eval_node(n.a, args) / eval_node(n.b, args);
            case Op::Neg: return -eval_node(n.a, args);
            case Op::Pow: return std::pow(eval_node(n.a, args), eval_node(n.b, args));
            case Op::Exp: return std::exp(eval_node(n.a, args));
            case Op::Log: return std::log(eval_node(n.a, args));
        }
        return 0.0;
    }
};

class Parser {
  public:
    Parser(const std::string& text, int k) : text_(text), k_(k) {}

    Program parse() {
        Program prog;
        nodes_ = &prog.nodes;
        pos_ = 0;
        prog.root = parse_sum();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return prog;
    }

  private:
    const std::string& text_;
    int k_;
    std::size_t pos_ = 0;
    std::vector<Node>* nodes_ = nullptr;

    [[noreturn]] void fail(const std::string& what) const {
        throw std::invalid_argument("expr: " + what + " at position " +
                                    std::to_string(pos_));
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    int add(Node n) {
        nodes_->push_back(n);
        return static_cast<int>(nodes_->size()) - 1;
    }

    int parse_sum() {
        int lhs = parse_product();
        for (;;) {
            if (accept('+')) lhs = add({Op::Add, 0, 0, lhs, parse_product()});
            else if (accept('-')) lhs = add({Op::Sub, 0, 0, lhs, parse_product()});
            else return lhs;
        }
    }

    int parse_product() {
        int lhs = parse_unary();
        for (;;) {
            if (accept('*')) lhs = add({Op::Mul, 0, 0, lhs, parse_unary()});
            else if (accept('/')) lhs = add({Op::Div, 0, 0, lhs, parse_unary()});
            else return lhs;
        }
    }

    int parse_unary() {
        if (accept('-')) return add({Op::Neg, 0, 0, parse_unary(), -1});
        return parse_power();
    }

    int parse_power() {
        int base = parse_primary();
        if (accept('^'))  // right associative
            return add({Op::Pow, 0, 0, base, parse_unary()});
        return base;
    }

    int parse_primary() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of expression");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            const int inner = parse_sum();
            if (!accept(')')) fail("missing ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = text_.c_str() + pos_;
            char* end = nullptr;
            const double v = std::strtod(begin, &end);
            if (end == begin) fail("bad numeric literal");
            pos_ += static_cast<std::size_t>(end - begin);
            return add({Op::Const, v, 0, -1, -1});
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::string name;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                name += text_[pos_++];
            if (name.size() >= 2 && name[0] == 'x' &&
                std::isdigit(static_cast<unsigned char>(name[1]))) {
                const int idx = std::atoi(name.c_str() + 1);
                if (idx < 0 || idx >= k_)
                    fail("variable " + name + " out of range for " + std::to_string(k_) +
                         " arguments");
                return add({Op::Var, 0, idx, -1, -1});
            }
            if (name == "exp" || name == "log") {
                if (!accept('(')) fail("expected '(' after " + name);
                const int arg = parse_sum();
                if (!accept(')')) fail("missing ')'");
                return add({name == "exp" ? Op::Exp : Op::Log, 0, 0, arg, -1});
            }
            if (name == "pow") {
                if (!accept('(')) fail("expected '(' after pow");
                const int a = parse_sum();
                if (!accept(',')) fail("pow needs two arguments");
                const int b = parse_sum();
                if (!accept(')')) fail("missing ')'");
                return add({Op::Pow, 0, 0, a, b});
            }
            fail("unknown identifier '" + name + "'");
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

}  // namespace expr_detail

/// Compile an expression over x0..x{k-1} into a delay map.
inline DelayMap parse_delay_map(const std::string& text, int k,
                                double lo = 0.0,
                                double hi = std::numeric_limits<double>::infinity()) {
    if (k < 1) throw std::invalid_argument("expr: need at least one argument");
    auto prog = std::make_shared<expr_detail::Program>(
        expr_detail::Parser(text, k).parse());
    DelayMap map;
    map.k = k;
    map.lo = lo;
    map.hi = hi;
    map.eval_fn = [prog](std::span<const double> args) { return prog->eval(args); };
    return map;
}

/// Compile a one-variable expression (variable x0) into a scalar map.
inline ScalarMap1D parse_scalar_map(const std::string& text, double lo = 0.0,
                                    double hi = std::numeric_limits<double>::infinity()) {
    auto prog = std::make_shared<expr_detail::Program>(
        expr_detail::Parser(text, 1).parse());
    ScalarMap1D map;
    map.lo = lo;
    map.hi = hi;
    map.eval = [prog](double x) {
        const double a[1] = {x};
        return prog->eval(a);
    };
    return map;
}

}  // namespace delaystab
