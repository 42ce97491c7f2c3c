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

#include "qrobust/gates.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "qrobust/errors.hpp"

namespace qrobust::gates {

namespace {

constexpr Complex kI{0.0, 1.0};

ComplexMatrix mat2(Complex a, Complex b, Complex c, Complex d) {
    ComplexMatrix m(2, 2);
    m << a, b, c, d;
    return m;
}

ComplexMatrix controlled(const ComplexMatrix& u, int n_controls) {
    const auto d = u.rows() << n_controls;
    ComplexMatrix m = ComplexMatrix::Identity(d, d);
    m.bottomRightCorner(u.rows(), u.cols()) = u;
    return m;
}

const std::map<std::string, GateInfo, std::less<>>& table() {
    static const std::map<std::string, GateInfo, std::less<>> t = {
        {"id", {1, 0}},  {"x", {1, 0}},   {"y", {1, 0}},    {"z", {1, 0}},  {"h", {1, 0}},
        {"s", {1, 0}},   {"sdg", {1, 0}}, {"t", {1, 0}},    {"tdg", {1, 0}}, {"rx", {1, 1}},
        {"ry", {1, 1}},  {"rz", {1, 1}},  {"u1", {1, 1}},   {"u2", {1, 2}}, {"u3", {1, 3}},
        {"U", {1, 3}},   {"cx", {2, 0}},  {"CX", {2, 0}},   {"cz", {2, 0}}, {"swap", {2, 0}},
        {"ccx", {3, 0}},
    };
    return t;
}

}  // namespace

ComplexMatrix pauli_x() { return mat2(0, 1, 1, 0); }
ComplexMatrix pauli_y() { return mat2(0, -kI, kI, 0); }
ComplexMatrix pauli_z() { return mat2(1, 0, 0, -1); }
ComplexMatrix hadamard() { return mat2(1, 1, 1, -1) / std::sqrt(2.0); }

ComplexMatrix rx(double theta) {
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    return mat2(c, -kI * s, -kI * s, c);
}

ComplexMatrix ry(double theta) {
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    return mat2(c, -s, s, c);
}

ComplexMatrix rz(double theta) {
    return mat2(std::exp(-kI * (theta / 2)), 0, 0, std::exp(kI * (theta / 2)));
}

ComplexMatrix u3(double theta, double phi, double lambda) {
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    return mat2(c, -std::exp(kI * lambda) * s, std::exp(kI * phi) * s, std::exp(kI * (phi + lambda)) * c);
}

const GateInfo* lookup(std::string_view name) {
    const auto& t = table();
    auto it = t.find(name);
    return it == t.end() ? nullptr : &it->second;
}

bool is_rotation(std::string_view name) { return name == "rx" || name == "ry" || name == "rz"; }

ComplexMatrix matrix_of(std::string_view name, std::span<const double> params) {
    const GateInfo* info = lookup(name);
    if (info == nullptr) throw InputError("unknown gate '" + std::string(name) + "'");
    if (static_cast<int>(params.size()) != info->n_params)
        throw InputError("gate '" + std::string(name) + "' expects " + std::to_string(info->n_params) +
                         " parameter(s), got " + std::to_string(params.size()));
    const double pi = std::numbers::pi;
    if (name == "id") return ComplexMatrix::Identity(2, 2);
    if (name == "x") return pauli_x();
    if (name == "y") return pauli_y();
    if (name == "z") return pauli_z();
    if (name == "h") return hadamard();
    if (name == "s") return mat2(1, 0, 0, kI);
    if (name == "sdg") return mat2(1, 0, 0, -kI);
    if (name == "t") return mat2(1, 0, 0, std::exp(kI * (pi / 4)));
    if (name == "tdg") return mat2(1, 0, 0, std::exp(-kI * (pi / 4)));
    if (name == "rx") return rx(params[0]);
    if (name == "ry") return ry(params[0]);
    if (name == "rz") return rz(params[0]);
    if (name == "u1") return u3(0.0, 0.0, params[0]);
    if (name == "u2") return u3(pi / 2, params[0], params[1]);
    if (name == "u3" || name == "U") return u3(params[0], params[1], params[2]);
    if (name == "cx" || name == "CX") return controlled(pauli_x(), 1);
    if (name == "cz") return controlled(pauli_z(), 1);
    if (name == "ccx") return controlled(pauli_x(), 2);
    // swap
    ComplexMatrix m = ComplexMatrix::Zero(4, 4);
    m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1.0;
    return m;
}

}  // namespace qrobust::gates
