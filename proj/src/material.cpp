#include "teig/material.hpp"

#include <stdexcept>

namespace teig {

MaterialModel material_reference() {
    return {[](Point2) { return SymMat2{1.0, 0.0, 1.0}; },
            [](Point2) { return 1.0; },
            "reference"};
}

MaterialModel material_isotropic_n16() {
    return {[](Point2) { return SymMat2{1.0, 0.0, 1.0}; },
            [](Point2) { return 16.0; },
            "isotropic_n16"};
}

MaterialModel material_aniso_A1() {
    return {[](Point2) { return SymMat2{0.5, 0.0, 0.125}; },
            [](Point2) { return 1.0; },
            "aniso_A1"};
}

MaterialModel material_aniso_A2() {
    return {[](Point2 p) {
                const double r2 = p.x * p.x + p.y * p.y;
                return SymMat2{r2 / 2.0, 0.0, (2.0 - r2) / 8.0};
            },
            [](Point2) { return 1.0; },
            "aniso_A2"};
}

MaterialModel material_preset(const std::string& name) {
    if (name == "reference") return material_reference();
    if (name == "isotropic_n16") return material_isotropic_n16();
    if (name == "aniso_A1") return material_aniso_A1();
    if (name == "aniso_A2") return material_aniso_A2();
    throw std::invalid_argument("unknown material preset: " + name);
}

}  // namespace teig
