from fractions import Fraction

from danielewski.linsolve import solve_linear


def test_unique_solution():
    rows = [
        ({"a": Fraction(1), "b": Fraction(1)}, Fraction(3)),
        ({"a": Fraction(1), "b": Fraction(-1)}, Fraction(1)),
    ]
    sol = solve_linear(rows, ["a", "b"])
    assert sol == {"a": Fraction(2), "b": Fraction(1)}


def test_inconsistent_returns_none():
    rows = [
        ({"a": Fraction(1)}, Fraction(1)),
        ({"a": Fraction(1)}, Fraction(2)),
    ]
    assert solve_linear(rows, ["a"]) is None


def test_underdetermined_pins_free_unknowns_to_zero():
    rows = [({"a": Fraction(1), "b": Fraction(2)}, Fraction(4))]
    sol = solve_linear(rows, ["a", "b"])
    assert sol == {"a": Fraction(4), "b": Fraction(0)}
    # determinism: unknown order decides which unknown carries the value
    sol2 = solve_linear(rows, ["b", "a"])
    assert sol2 == {"b": Fraction(2), "a": Fraction(0)}


def test_exact_rational_elimination():
    rows = [
        ({"a": Fraction(1, 3), "b": Fraction(1, 7)}, Fraction(1)),
        ({"a": Fraction(2), "b": Fraction(-1, 2)}, Fraction(0)),
    ]
    sol = solve_linear(rows, ["a", "b"])
    a, b = sol["a"], sol["b"]
    assert Fraction(1, 3) * a + Fraction(1, 7) * b == 1
    assert 2 * a - Fraction(1, 2) * b == 0
