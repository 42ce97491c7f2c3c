// Copyright 2026 The qrobust Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qrobust/qasm.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>

#include "qrobust/gates.hpp"

namespace qrobust {

QasmError::QasmError(const std::string& message, int line, int column)
    : InputError("qasm:" + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

namespace {

enum class Tok { ident, number, string, symbol, arrow, end };

struct Token {
    Tok kind;
    std::string text;
    double number = 0.0;
    int line = 1;
    int column = 1;
};

std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < src.size()) {
        const char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        Token t{Tok::symbol, "", 0.0, line, col};
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
            t.kind = Tok::ident;
            t.text = std::string(src.substr(i, j - i));
            advance(j - i);
        } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                   (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            if (j < src.size() && src[j] == '.') {
                ++j;
                while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            }
            if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
                if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
                    j = k;
                    while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
                }
            }
            t.kind = Tok::number;
            t.text = std::string(src.substr(i, j - i));
            t.number = std::strtod(t.text.c_str(), nullptr);
            advance(j - i);
        } else if (c == '"') {
            std::size_t j = i + 1;
            while (j < src.size() && src[j] != '"' && src[j] != '\n') ++j;
            if (j >= src.size() || src[j] != '"') throw QasmError("unterminated string", line, col);
            t.kind = Tok::string;
            t.text = std::string(src.substr(i + 1, j - i - 1));
            advance(j - i + 1);
        } else if (c == '-' && i + 1 < src.size() && src[i + 1] == '>') {
            t.kind = Tok::arrow;
            t.text = "->";
            advance(2);
        } else if (std::string_view(";,()[]{}+-*/^=").find(c) != std::string_view::npos) {
            t.text = std::string(1, c);
            advance(1);
        } else {
            throw QasmError(std::string("unexpected character '") + c + "'", line, col);
        }
        out.push_back(std::move(t));
    }
    out.push_back({Tok::end, "", 0.0, line, col});
    return out;
}

struct Expr {
    enum class Op { number, ident, neg, add, sub, mul, div, pow } op;
    double value = 0.0;
    std::string ident;
    int line = 0, column = 0;
    std::unique_ptr<Expr> lhs, rhs;
};

using ExprPtr = std::unique_ptr<Expr>;
using Env = std::map<std::string, double, std::less<>>;

double eval(const Expr& e, const Env& env) {
    switch (e.op) {
        case Expr::Op::number: return e.value;
        case Expr::Op::ident: {
            auto it = env.find(e.ident);
            if (it == env.end()) throw QasmError("unknown identifier '" + e.ident + "' in expression", e.line, e.column);
            return it->second;
        }
        case Expr::Op::neg: return -eval(*e.lhs, env);
        case Expr::Op::add: return eval(*e.lhs, env) + eval(*e.rhs, env);
        case Expr::Op::sub: return eval(*e.lhs, env) - eval(*e.rhs, env);
        case Expr::Op::mul: return eval(*e.lhs, env) * eval(*e.rhs, env);
        case Expr::Op::div: {
            const double d = eval(*e.rhs, env);
            if (d == 0.0) throw QasmError("division by zero", e.line, e.column);
            return eval(*e.lhs, env) / d;
        }
        case Expr::Op::pow: return std::pow(eval(*e.lhs, env), eval(*e.rhs, env));
    }
    return 0.0;
}

struct MacroCall {
    std::string name;
    std::vector<ExprPtr> params;
    std::vector<std::string> args;
    int line, column;
};

struct Macro {
    std::vector<std::string> params;
    std::vector<std::string> qargs;
    std::vector<MacroCall> body;
};

struct Arg {
    std::string reg;
    std::optional<long> index;
    int line, column;
};

class Parser {
public:
    explicit Parser(std::string_view src) : toks_(tokenize(src)) {}

    QasmProgram run() {
        expect_ident("OPENQASM", "program must start with 'OPENQASM 2.0;'");
        const Token& ver = peek();
        if (ver.kind != Tok::number) fail(ver, "expected version number after OPENQASM");
        if (ver.text != "2.0" && ver.text != "2") fail(ver, "unsupported OpenQASM version " + ver.text);
        next();
        expect(";");
        version_ = "2.0";
        while (peek().kind != Tok::end) statement();
        if (!circuit_) throw QasmError("program declares no qreg", peek().line, peek().column);
        return QasmProgram{version_, qreg_name_, std::move(*circuit_), measured_};
    }

private:
    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    [[noreturn]] void fail(const Token& t, const std::string& msg) const { throw QasmError(msg, t.line, t.column); }

    bool is_symbol(const char* s) const { return peek().kind == Tok::symbol && peek().text == s; }

    void expect(const char* sym) {
        if (!is_symbol(sym)) {
            const Token& t = peek();
            fail(t, std::string("expected '") + sym + "' but found " + describe(t));
        }
        next();
    }

    static std::string describe(const Token& t) {
        if (t.kind == Tok::end) return "end of input";
        return "'" + t.text + "'";
    }

    void expect_ident(const char* word, const char* msg) {
        if (peek().kind != Tok::ident || peek().text != word) fail(peek(), msg);
        next();
    }

    std::string ident(const char* what) {
        if (peek().kind != Tok::ident) fail(peek(), std::string("expected ") + what + " but found " + describe(peek()));
        return next().text;
    }

    long integer(const char* what) {
        const Token& t = peek();
        if (t.kind != Tok::number || t.text.find_first_not_of("0123456789") != std::string::npos)
            fail(t, std::string("expected integer ") + what);
        next();
        return std::strtol(t.text.c_str(), nullptr, 10);
    }

    void statement() {
        const Token& t = peek();
        if (t.kind != Tok::ident) fail(t, "expected a statement but found " + describe(t));
        const std::string& w = t.text;
        if (w == "include") {
            next();
            if (peek().kind != Tok::string) fail(peek(), "expected file name after include");
            next();
            expect(";");
        } else if (w == "qreg") {
            next();
            const Token& at = peek();
            std::string name = ident("register name");
            expect("[");
            long size = integer("register size");
            expect("]");
            expect(";");
            if (circuit_) fail(at, "only a single quantum register is supported");
            if (size < 1) fail(at, "quantum register must have at least one qubit");
            qreg_name_ = name;
            circuit_.emplace(static_cast<int>(size));
        } else if (w == "creg") {
            next();
            const Token& at = peek();
            std::string name = ident("register name");
            expect("[");
            long size = integer("register size");
            expect("]");
            expect(";");
            if (cregs_.count(name)) fail(at, "creg '" + name + "' declared twice");
            cregs_[name] = size;
        } else if (w == "gate") {
            next();
            gate_definition();
        } else if (w == "opaque" || w == "if" || w == "reset") {
            fail(t, "unsupported construct '" + w + "'");
        } else if (w == "barrier") {
            next();
            args();
            expect(";");
        } else if (w == "measure") {
            next();
            measure();
        } else {
            gate_call();
        }
    }

    void gate_definition() {
        const Token& at = peek();
        std::string name = ident("gate name");
        if (macros_.count(name)) fail(at, "gate '" + name + "' defined twice");
        Macro m;
        if (is_symbol("(")) {
            next();
            if (!is_symbol(")")) {
                m.params.push_back(ident("parameter name"));
                while (is_symbol(",")) {
                    next();
                    m.params.push_back(ident("parameter name"));
                }
            }
            expect(")");
        }
        m.qargs.push_back(ident("qubit argument"));
        while (is_symbol(",")) {
            next();
            m.qargs.push_back(ident("qubit argument"));
        }
        expect("{");
        while (!is_symbol("}")) {
            const Token& st = peek();
            if (st.kind == Tok::end) fail(st, "unterminated gate body");
            if (st.kind != Tok::ident) fail(st, "expected gate call in gate body");
            if (st.text == "barrier") {
                next();
                while (!is_symbol(";")) {
                    if (peek().kind == Tok::end) fail(peek(), "expected ';'");
                    next();
                }
                expect(";");
                continue;
            }
            if (st.text == "if" || st.text == "reset" || st.text == "measure" || st.text == "opaque")
                fail(st, "unsupported construct '" + st.text + "' in gate body");
            MacroCall call{next().text, {}, {}, st.line, st.column};
            if (is_symbol("(")) {
                next();
                if (!is_symbol(")")) {
                    call.params.push_back(expression());
                    while (is_symbol(",")) {
                        next();
                        call.params.push_back(expression());
                    }
                }
                expect(")");
            }
            call.args.push_back(ident("qubit argument"));
            while (is_symbol(",")) {
                next();
                call.args.push_back(ident("qubit argument"));
            }
            expect(";");
            for (const auto& a : call.args)
                if (std::find(m.qargs.begin(), m.qargs.end(), a) == m.qargs.end())
                    throw QasmError("unknown qubit argument '" + a + "' in gate '" + name + "'", call.line, call.column);
            m.body.push_back(std::move(call));
        }
        expect("}");
        macros_.emplace(std::move(name), std::move(m));
    }

    ExprPtr expression() {
        ExprPtr lhs = term();
        while (is_symbol("+") || is_symbol("-")) {
            const Token& t = next();
            auto e = std::make_unique<Expr>();
            e->op = t.text == "+" ? Expr::Op::add : Expr::Op::sub;
            e->line = t.line;
            e->column = t.column;
            e->lhs = std::move(lhs);
            e->rhs = term();
            lhs = std::move(e);
        }
        return lhs;
    }

    ExprPtr term() {
        ExprPtr lhs = unary();
        while (is_symbol("*") || is_symbol("/")) {
            const Token& t = next();
            auto e = std::make_unique<Expr>();
            e->op = t.text == "*" ? Expr::Op::mul : Expr::Op::div;
            e->line = t.line;
            e->column = t.column;
            e->lhs = std::move(lhs);
            e->rhs = unary();
            lhs = std::move(e);
        }
        return lhs;
    }

    ExprPtr unary() {
        if (is_symbol("-")) {
            const Token& t = next();
            auto e = std::make_unique<Expr>();
            e->op = Expr::Op::neg;
            e->line = t.line;
            e->column = t.column;
            e->lhs = unary();
            return e;
        }
        if (is_symbol("+")) {
            next();
            return unary();
        }
        ExprPtr base = primary();
        if (is_symbol("^")) {
            const Token& t = next();
            auto e = std::make_unique<Expr>();
            e->op = Expr::Op::pow;
            e->line = t.line;
            e->column = t.column;
            e->lhs = std::move(base);
            e->rhs = unary();
            return e;
        }
        return base;
    }

    ExprPtr primary() {
        const Token& t = peek();
        auto e = std::make_unique<Expr>();
        e->line = t.line;
        e->column = t.column;
        if (t.kind == Tok::number) {
            e->op = Expr::Op::number;
            e->value = t.number;
            next();
            return e;
        }
        if (t.kind == Tok::ident) {
            next();
            if (t.text == "pi") {
                e->op = Expr::Op::number;
                e->value = std::numbers::pi;
                return e;
            }
            if (is_symbol("(")) fail(t, "unsupported function '" + t.text + "' in expression");
            e->op = Expr::Op::ident;
            e->ident = t.text;
            return e;
        }
        if (is_symbol("(")) {
            next();
            ExprPtr inner = expression();
            expect(")");
            return inner;
        }
        fail(t, "expected expression but found " + describe(t));
    }

    std::vector<Arg> args() {
        std::vector<Arg> out;
        out.push_back(arg());
        while (is_symbol(",")) {
            next();
            out.push_back(arg());
        }
        return out;
    }

    Arg arg() {
        const Token& t = peek();
        Arg a{ident("register argument"), std::nullopt, t.line, t.column};
        if (is_symbol("[")) {
            next();
            a.index = integer("qubit index");
            expect("]");
        }
        return a;
    }

    int resolve_qubit(const Arg& a, long index) const {
        if (!circuit_) throw QasmError("qreg must be declared before use", a.line, a.column);
        if (a.reg != qreg_name_) throw QasmError("unknown quantum register '" + a.reg + "'", a.line, a.column);
        if (index < 0 || index >= circuit_->n_qubits())
            throw QasmError("qubit index " + std::to_string(index) + " out of range for " + a.reg + "[" +
                                std::to_string(circuit_->n_qubits()) + "]",
                            a.line, a.column);
        return static_cast<int>(index);
    }

    void measure() {
        const Arg q = arg();
        if (peek().kind != Tok::arrow) fail(peek(), "expected '->' in measure");
        next();
        const Arg c = arg();
        expect(";");
        if (!cregs_.count(c.reg)) throw QasmError("unknown classical register '" + c.reg + "'", c.line, c.column);
        const long csize = cregs_[c.reg];
        if (c.index && (*c.index < 0 || *c.index >= csize))
            throw QasmError("classical bit index out of range", c.line, c.column);
        std::vector<int> qs;
        if (q.index) {
            qs.push_back(resolve_qubit(q, *q.index));
        } else {
            if (!circuit_) throw QasmError("qreg must be declared before use", q.line, q.column);
            resolve_qubit(q, 0);
            for (int i = 0; i < circuit_->n_qubits(); ++i) qs.push_back(i);
        }
        for (int i : qs)
            if (std::find(measured_.begin(), measured_.end(), i) == measured_.end()) measured_.push_back(i);
    }

    void gate_call() {
        const Token& at = next();
        const std::string name = at.text;
        std::vector<double> params;
        if (is_symbol("(")) {
            next();
            if (!is_symbol(")")) {
                params.push_back(eval(*expression(), {}));
                while (is_symbol(",")) {
                    next();
                    params.push_back(eval(*expression(), {}));
                }
            }
            expect(")");
        }
        const std::vector<Arg> as = args();
        expect(";");
        if (!circuit_) fail(at, "qreg must be declared before gates");
        // Broadcast over whole-register arguments.
        std::size_t width = 1;
        for (const auto& a : as) {
            resolve_qubit(a, a.index.value_or(0));
            if (!a.index) width = static_cast<std::size_t>(circuit_->n_qubits());
        }
        for (std::size_t k = 0; k < width; ++k) {
            std::vector<int> qubits;
            for (const auto& a : as) qubits.push_back(a.index ? static_cast<int>(*a.index) : static_cast<int>(k));
            for (std::size_t i = 0; i < qubits.size(); ++i)
                for (std::size_t j = 0; j < i; ++j)
                    if (qubits[i] == qubits[j]) fail(at, "gate '" + name + "' repeats a qubit argument");
            expand(name, params, qubits, at.line, at.column, 0);
        }
    }

    void expand(const std::string& name, const std::vector<double>& params, const std::vector<int>& qubits, int line,
                int column, int depth) {
        if (depth > 64) throw QasmError("gate definitions nest too deeply", line, column);
        auto it = macros_.find(name);
        if (it != macros_.end()) {
            const Macro& m = it->second;
            if (params.size() != m.params.size())
                throw QasmError("gate '" + name + "' expects " + std::to_string(m.params.size()) + " parameter(s)", line,
                                column);
            if (qubits.size() != m.qargs.size())
                throw QasmError("gate '" + name + "' expects " + std::to_string(m.qargs.size()) + " qubit(s)", line,
                                column);
            Env env;
            for (std::size_t i = 0; i < params.size(); ++i) env[m.params[i]] = params[i];
            for (const auto& call : m.body) {
                std::vector<double> p;
                for (const auto& e : call.params) p.push_back(eval(*e, env));
                std::vector<int> q;
                for (const auto& a : call.args) {
                    auto pos = std::find(m.qargs.begin(), m.qargs.end(), a) - m.qargs.begin();
                    q.push_back(qubits[static_cast<std::size_t>(pos)]);
                }
                expand(call.name, p, q, call.line, call.column, depth + 1);
            }
            return;
        }
        const auto* info = gates::lookup(name);
        if (info == nullptr) throw QasmError("unknown gate '" + name + "'", line, column);
        if (static_cast<int>(qubits.size()) != info->arity)
            throw QasmError("gate '" + name + "' acts on " + std::to_string(info->arity) + " qubit(s), got " +
                                std::to_string(qubits.size()),
                            line, column);
        if (static_cast<int>(params.size()) != info->n_params)
            throw QasmError("gate '" + name + "' expects " + std::to_string(info->n_params) + " parameter(s), got " +
                                std::to_string(params.size()),
                            line, column);
        circuit_->append(Gate::make(name, qubits, params));
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::string version_;
    std::string qreg_name_;
    std::optional<Circuit> circuit_;
    std::map<std::string, long, std::less<>> cregs_;
    std::map<std::string, Macro, std::less<>> macros_;
    std::vector<int> measured_;
};

std::string format_angle(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string short_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

}  // namespace

QasmProgram parse_qasm_program(std::string_view source) { return Parser(source).run(); }

Circuit parse_qasm(std::string_view source) { return parse_qasm_program(source).circuit; }

std::string serialize_qasm(const Circuit& circuit, const std::vector<int>& measured_qubits) {
    std::ostringstream out;
    out << "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";
    out << "qreg q[" << circuit.n_qubits() << "];\n";
    if (!measured_qubits.empty()) out << "creg c[" << measured_qubits.size() << "];\n";
    for (const auto& inst : circuit.instructions()) {
        const auto* g = std::get_if<Gate>(&inst);
        if (g == nullptr) continue;
        if (gates::lookup(g->name) == nullptr)
            throw InputError("gate '" + g->name + "' has no OpenQASM 2.0 spelling");
        out << g->name;
        if (!g->params.empty()) {
            out << "(";
            for (std::size_t i = 0; i < g->params.size(); ++i) out << (i ? "," : "") << format_angle(g->params[i]);
            out << ")";
        }
        for (std::size_t i = 0; i < g->qubits.size(); ++i) out << (i ? "," : " ") << "q[" << g->qubits[i] << "]";
        out << ";\n";
    }
    for (std::size_t i = 0; i < measured_qubits.size(); ++i)
        out << "measure q[" << measured_qubits[i] << "] -> c[" << i << "];\n";
    return out.str();
}

namespace {

std::vector<std::string> column_cells(const Instruction& inst, int n) {
    std::vector<std::string> cells(static_cast<std::size_t>(n));
    const auto& qs = targets_of(inst);
    auto cell = [&](int q) -> std::string& { return cells[static_cast<std::size_t>(q)]; };
    if (const auto* g = std::get_if<Gate>(&inst)) {
        const std::string& nm = g->name;
        if (nm == "cx" || nm == "CX" || nm == "ccx") {
            for (std::size_t i = 0; i + 1 < qs.size(); ++i) cell(qs[i]) = "@";
            cell(qs.back()) = "X";
        } else if (nm == "cz") {
            cell(qs[0]) = "@";
            cell(qs[1]) = "@";
        } else if (nm == "swap") {
            cell(qs[0]) = "x";
            cell(qs[1]) = "x";
        } else {
            std::string label;
            for (char c : nm) label.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
            if (!g->params.empty()) {
                label += "(";
                for (std::size_t i = 0; i < g->params.size(); ++i) label += (i ? "," : "") + short_number(g->params[i]);
                label += ")";
            }
            if (qs.size() == 1) {
                cell(qs[0]) = label;
            } else {
                for (std::size_t i = 0; i < qs.size(); ++i) cell(qs[i]) = label + ":" + std::to_string(i);
            }
        }
    } else {
        const auto& site = std::get<NoiseSite>(inst);
        std::string label = "[" + std::string(short_tag(site.channel.kind()));
        if (site.channel.level()) label += " " + short_number(*site.channel.level());
        label += "]";
        for (int q : qs) cell(q) = label;
    }
    if (qs.size() > 1) {
        const int lo = *std::min_element(qs.begin(), qs.end());
        const int hi = *std::max_element(qs.begin(), qs.end());
        for (int q = lo + 1; q < hi; ++q)
            if (cell(q).empty()) cell(q) = "|";
    }
    return cells;
}

}  // namespace

std::string render_text(const Circuit& circuit, const std::vector<int>& measured_qubits) {
    const int n = circuit.n_qubits();
    std::vector<std::vector<std::string>> columns;
    for (const auto& inst : circuit.instructions()) columns.push_back(column_cells(inst, n));
    if (!measured_qubits.empty()) {
        std::vector<std::string> m(static_cast<std::size_t>(n));
        for (int q : measured_qubits)
            if (q >= 0 && q < n) m[static_cast<std::size_t>(q)] = "M";
        columns.push_back(std::move(m));
    }
    const std::size_t prefix = ("q" + std::to_string(n - 1)).size();
    std::ostringstream out;
    for (int q = 0; q < n; ++q) {
        std::string name = "q" + std::to_string(q);
        name.resize(prefix, ' ');
        std::string row = name + ": -";
        for (const auto& col : columns) {
            std::size_t width = 1;
            for (const auto& c : col) width = std::max(width, c.size());
            const std::string& c = col[static_cast<std::size_t>(q)];
            const std::size_t pad = width - c.size();
            row += std::string(pad / 2, '-') + c + std::string(pad - pad / 2, '-') + "-";
            if (c.empty()) row.back() = '-';
        }
        if (columns.empty()) row += "-";
        out << row << "\n";
    }
    return out.str();
}

}  // namespace qrobust
