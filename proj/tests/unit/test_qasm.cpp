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

#include <cmath>
#include <numbers>
#include <sstream>

#include "gtest/gtest.h"

#include "qrobust/errors.hpp"
#include "qrobust/gates.hpp"
#include "test_support.hpp"

using namespace qrobust;
using qrobust::oracle::Rng;

namespace {

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(parse_qasm, single_x) {
    const Circuit c = parse_qasm("OPENQASM 2.0; qreg q[1]; x q[0];");
    ASSERT_EQ(c.n_qubits(), 1);
    ASSERT_EQ(c.size(), 1U);
    EXPECT_EQ(std::get<Gate>(c.instructions()[0]).name, "x");
}

TEST(parse_qasm, constant_folding) {
    const Circuit c = parse_qasm("OPENQASM 2.0;\nqreg q[1];\nry(pi/2) q[0];\nrz(-(1+2)*pi/4 - -1) q[0];");
    EXPECT_NEAR(std::get<Gate>(c.instructions()[0]).params[0], 1.5707963, 1e-7);
    EXPECT_NEAR(std::get<Gate>(c.instructions()[1]).params[0], -3 * std::numbers::pi / 4 + 1, 1e-15);
}

TEST(parse_qasm, macro_matches_manual_expansion) {
    const std::string src = R"(OPENQASM 2.0;
include "qelib1.inc";
gate hc a, b { h a; cx a, b; }
qreg q[2];
hc q[0], q[1];
)";
    const Circuit parsed = parse_qasm(src);
    Circuit manual(2);
    manual.append(Gate::make("h", {0}));
    manual.append(Gate::make("cx", {0, 1}));
    EXPECT_TRUE(same_instructions(parsed, manual));
    EXPECT_LE(max_abs(circuit_unitary(parsed) - oracle::gate_product_unitary(manual)), 1e-12);
}

TEST(parse_qasm, nested_macros_and_parameters) {
    const std::string src = R"(OPENQASM 2.0;
gate r2(a, b) x { rx(a) x; rz(b * 2) x; }
gate pair(t) x, y { r2(t, t / 2) x; cz x, y; }
qreg q[2];
pair(0.4) q[1], q[0];
)";
    const Circuit c = parse_qasm(src);
    ASSERT_EQ(c.size(), 3U);
    EXPECT_NEAR(std::get<Gate>(c.instructions()[1]).params[0], 0.4, 1e-15);
    EXPECT_EQ(std::get<Gate>(c.instructions()[2]).qubits, (std::vector<int>{1, 0}));
}

TEST(parse_qasm, measure_records_qubits) {
    const auto prog = parse_qasm_program("OPENQASM 2.0; qreg q[3]; creg c[3]; measure q[2] -> c[0]; measure q[0] -> c[1];");
    EXPECT_EQ(prog.measured_qubits, (std::vector<int>{2, 0}));
    EXPECT_EQ(prog.qreg_name, "q");
    const auto all = parse_qasm_program("OPENQASM 2.0; qreg q[2]; creg c[2]; measure q -> c;");
    EXPECT_EQ(all.measured_qubits, (std::vector<int>{0, 1}));
}

TEST(parse_qasm, errors_carry_positions) {
    try {
        parse_qasm("OPENQASM 2.0;\nqreg q[1];\n  foo q[0];");
        FAIL();
    } catch (const QasmError& e) {
        EXPECT_EQ(e.line(), 3);
        EXPECT_EQ(e.column(), 3);
        EXPECT_NE(std::string(e.what()).find("unknown gate 'foo'"), std::string::npos);
    }
    try {
        parse_qasm("OPENQASM 2.0;\nqreg q[1];\nx q[0]");
        FAIL();
    } catch (const QasmError& e) {
        EXPECT_EQ(e.line(), 3);
    }
}

TEST(parse_qasm, rejects_unsupported_constructs) {
    for (const char* word : {"if", "reset", "opaque"}) {
        std::string src = std::string("OPENQASM 2.0; qreg q[1]; creg c[1]; ") + word + " q[0];";
        try {
            parse_qasm(src);
            FAIL() << word;
        } catch (const QasmError& e) {
            EXPECT_NE(std::string(e.what()).find(std::string("'") + word + "'"), std::string::npos) << e.what();
        }
    }
}

TEST(parse_qasm, input_errors) {
    EXPECT_THROW(parse_qasm("qreg q[1]; x q[0];"), QasmError);
    EXPECT_THROW(parse_qasm("OPENQASM 3.0; qreg q[1];"), QasmError);
    EXPECT_THROW(parse_qasm("OPENQASM 2.0; qreg q[1]; x q[1];"), QasmError);
    EXPECT_THROW(parse_qasm("OPENQASM 2.0; qreg q[2]; cx q[0];"), QasmError);
    EXPECT_THROW(parse_qasm("OPENQASM 2.0; qreg q[2]; rx q[0];"), QasmError);
    EXPECT_THROW(parse_qasm("OPENQASM 2.0; qreg q[2]; qreg r[2];"), QasmError);
    EXPECT_THROW(parse_qasm("OPENQASM 2.0; qreg q[2]; x r[0];"), QasmError);
    EXPECT_THROW(parse_qasm("OPENQASM 2.0; qreg q[2]; rx(theta) q[0];"), QasmError);
    EXPECT_THROW(parse_qasm("OPENQASM 2.0; qreg q[2]; rx(sin(1)) q[0];"), QasmError);
    EXPECT_THROW(parse_qasm("OPENQASM 2.0; qreg q[2]; cx q[0], q[0];"), QasmError);
    EXPECT_THROW(parse_qasm("OPENQASM 2.0; qreg q[2]; x q[0]; $"), QasmError);
}

TEST(parse_qasm, round_trip_generated_programs) {
    Rng rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + trial % 4;
        Circuit expected(n);
        const std::string src = oracle::random_program(rng, n, &expected);
        const auto first = parse_qasm_program(src);
        ASSERT_TRUE(same_instructions(first.circuit, expected)) << src;
        const std::string text = serialize_qasm(first.circuit, first.measured_qubits);
        const auto second = parse_qasm_program(text);
        ASSERT_TRUE(same_instructions(first.circuit, second.circuit)) << text;
        EXPECT_EQ(first.measured_qubits, second.measured_qubits);
        EXPECT_LE(max_abs(circuit_unitary(first.circuit) - oracle::gate_product_unitary(expected)), 1e-9);
    }
}

TEST(render_text, empty_circuit) { EXPECT_EQ(render_text(Circuit(1)), "q0: --\n"); }

TEST(render_text, x_then_cx) {
    Circuit c(2);
    c.append(Gate::make("x", {0}));
    c.append(Gate::make("cx", {0, 1}));
    const std::string out = render_text(c);
    EXPECT_EQ(out, "q0: -X-@-\nq1: ---X-\n");
}

TEST(render_text, noise_label_and_measurement) {
    Circuit c(2);
    c.append(Gate::make("h", {0}));
    c.append(NoiseSite{standard_channel(NoiseKind::bit_flip, 0.01), {1}});
    c.append(Gate::make("cz", {1, 0}));
    const std::string out = render_text(c, {1});
    std::istringstream lines(out);
    std::string row0, row1;
    std::getline(lines, row0);
    std::getline(lines, row1);
    EXPECT_NE(row1.find("[BF 0.01]"), std::string::npos) << out;
    EXPECT_LT(row0.find('H'), row1.find("[BF"));
    EXPECT_EQ(row1.back(), '-');
    EXPECT_NE(row1.find('M'), std::string::npos);
    EXPECT_EQ(row0.find('M'), std::string::npos);
    EXPECT_EQ(row0.size(), row1.size());
    EXPECT_EQ(render_text(c, {1}), out);
}

TEST(render_text, three_instructions_three_columns) {
    Circuit c(3);
    c.append(Gate::make("h", {0}));
    c.append(Gate::make("cx", {0, 2}));
    c.append(Gate::make("rz", {1}, {0.5}));
    EXPECT_EQ(render_text(c), "q0: -H-@---------\nq1: ---|-RZ(0.5)-\nq2: ---X---------\n");
}
