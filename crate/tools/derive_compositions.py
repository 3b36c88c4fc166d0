"""Symbolic partial derivatives of composed expressions, frozen for the jet tests.

Writes crates/core/tests/fixtures/compositions.txt, one case per line:

    expression;point;order;e1 e2=value;...
"""

import itertools
import pathlib

import sympy as sp

OUT = pathlib.Path(__file__).resolve().parent.parent / "crates/core/tests/fixtures/compositions.txt"
x1, x2 = sp.symbols("x1 x2", real=True)

CASES = [
    "sin(x1^2 + x2)",
    "sin(3*x1 - x2^3)",
    "sin(x1*x2 + 1)",
    "sin(x1^3 - 2*x1*x2 + x2^2)",
    "sin(0.5*x1^4 + x2)",
    "sin(x1 + x2)*cos(x1 - x2)",
    "cos(x1^2 - x2^2)",
    "exp(x1^2 + x2)",
    "exp(-x1^2/2 - x2^2/2)",
    "exp(x1*x2 - x2^3)",
    "exp(0.3*x1^3 + x1*x2^2)",
    "exp(sin(x1) + x2^2)",
    "log(1 + x1^2 + x2^2)",
    "log(1 + x1^2*x2^2)",
    "log(2 + x1 + x2^3)",
    "log(1 + x1^4 + 0.5*x2)",
    "log(3 + x1*x2 + x2^2)",
    "sqrt(1 + x1^2 + x2^2)",
    "tanh(x1*x2 + x1^2)",
    "(1 + x1^2 + x2^2)^(-2) * exp(x2)",
]
POINT = (sp.Rational(7, 10), sp.Rational(-3, 10))
ORDER = 4


def main():
    lines = []
    for text in CASES:
        e = sp.sympify(text.replace("^", "**"), locals={"x1": x1, "x2": x2})
        parts = [text, f"{float(POINT[0])!r},{float(POINT[1])!r}", str(ORDER)]
        for total in range(ORDER + 1):
            for a in range(total, -1, -1):
                b = total - a
                d = e
                if a:
                    d = sp.diff(d, x1, a)
                if b:
                    d = sp.diff(d, x2, b)
                v = sp.N(d.subs({x1: POINT[0], x2: POINT[1]}), 30)
                parts.append(f"{a} {b}={float(v)!r}")
        lines.append(";".join(parts))
    OUT.write_text("\n".join(lines) + "\n")
    print(f"wrote {len(lines)} cases to {OUT}")


if __name__ == "__main__":
    main()
