#include <doctest.h>

#include <stdexcept>

#include "teig/expr.hpp"
#include "teig/material.hpp"

using namespace teig;

TEST_SUITE_BEGIN("expr");

TEST_CASE("expression arithmetic") {
    CHECK(Expr::parse("1 + 2*3").eval(0, 0) == doctest::Approx(7.0));
    CHECK(Expr::parse("(x^2+y^2)/2").eval(0.3, -0.4) == doctest::Approx(0.125));
    CHECK(Expr::parse("(2-x^2-y^2)/8").eval(0.5, 0.5) == doctest::Approx(1.5 / 8.0));
    CHECK(Expr::parse("-x^2").eval(2, 0) == doctest::Approx(-4.0));   // unary minus binds the power
    CHECK(Expr::parse("2^3^1").eval(0, 0) == doctest::Approx(8.0));
    CHECK(Expr::parse("x - y - 1").eval(5, 2) == doctest::Approx(2.0));  // left-assoc subtraction
    CHECK(Expr::parse(" 1e-3 * x ").eval(2, 0) == doctest::Approx(2e-3));
}

TEST_CASE("expression errors carry positions") {
    CHECK_THROWS_AS(Expr::parse("x + "), std::invalid_argument);
    CHECK_THROWS_AS(Expr::parse("z + 1"), std::invalid_argument);
    CHECK_THROWS_AS(Expr::parse("(x + 1"), std::invalid_argument);
    CHECK_THROWS_AS(Expr::parse("x 1"), std::invalid_argument);
    CHECK_THROWS_AS(Expr::parse("xy"), std::invalid_argument);
    try {
        Expr::parse("1 + @");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("position 5") != std::string::npos);
    }
}

TEST_CASE("material presets") {
    const MaterialModel iso = material_preset("isotropic_n16");
    CHECK(iso.A({0.1, 0.2})[0] == 1.0);
    CHECK(iso.A({0.1, 0.2})[1] == 0.0);
    CHECK(iso.n({0.1, 0.2}) == 16.0);

    const MaterialModel a1 = material_preset("aniso_A1");
    CHECK(a1.A({0, 0})[0] == 0.5);
    CHECK(a1.A({0, 0})[2] == 0.125);
    CHECK(a1.n({0, 0}) == 1.0);

    const MaterialModel a2 = material_preset("aniso_A2");
    CHECK(a2.A({0.6, 0.8})[0] == doctest::Approx(0.5));
    CHECK(a2.A({0.6, 0.8})[2] == doctest::Approx(0.125));
    CHECK(a2.n({0.6, 0.8}) == 1.0);

    CHECK_THROWS_AS(material_preset("nope"), std::invalid_argument);
}

TEST_CASE("symmetric 2x2 minimum eigenvalue") {
    CHECK(sym2_min_eigenvalue({1.0, 0.0, 1.0}) == doctest::Approx(1.0));
    CHECK(sym2_min_eigenvalue({2.0, 1.0, 2.0}) == doctest::Approx(1.0));
    CHECK(sym2_min_eigenvalue({0.5, 0.0, 0.125}) == doctest::Approx(0.125));
    CHECK(sym2_min_eigenvalue({1.0, 2.0, 1.0}) == doctest::Approx(-1.0));
}

TEST_SUITE_END();
