"""Derive catalog ground truths symbolically and freeze them as a Rust fixture.

Writes crates/core/fixtures/catalog_truth.rs. Run from the repository root:

    python3 tools/derive_catalog.py
"""

import math
import pathlib
import random

import sympy as sp

OUT = pathlib.Path(__file__).resolve().parent.parent / "crates/core/fixtures/catalog_truth.rs"
X = sp.symbols("x1:4", real=True)


def render(e):
    e = sp.simplify(e)
    e = e.replace(sp.cot, lambda a: sp.cos(a) / sp.sin(a))
    e = e.replace(sp.tan, lambda a: sp.sin(a) / sp.cos(a))
    e = e.replace(sp.sec, lambda a: 1 / sp.cos(a))
    e = e.replace(sp.csc, lambda a: 1 / sp.sin(a))
    e = e.subs(sp.pi, sp.Float(math.pi, 17))
    text = sp.sstr(e, full_prec=False).replace("**", "^")
    if "E" in text.replace("e-", "").replace("e+", "") or "pi" in text or "I" in text:
        raise ValueError(f"unrenderable expression {text}")
    return text


def geometry(metric, log_rho, n):
    x = X[:n]
    g = sp.Matrix(metric)
    ginv = sp.simplify(g.inv())
    chris = [[[sp.simplify(sum(ginv[k, l] * (sp.diff(g[j, l], x[i]) + sp.diff(g[i, l], x[j]) - sp.diff(g[i, j], x[l]))
                                   for l in range(n)) / 2)
               for j in range(n)] for i in range(n)] for k in range(n)]

    def riemann(l, i, j, k):
        r = sp.diff(chris[l][j][k], x[i]) - sp.diff(chris[l][i][k], x[j])
        r += sum(chris[l][i][m] * chris[m][j][k] - chris[l][j][m] * chris[m][i][k] for m in range(n))
        return r

    ricci = sp.Matrix(n, n, lambda j, k: sp.simplify(sum(riemann(i, i, j, k) for i in range(n))))
    hess = sp.Matrix(n, n, lambda i, j: sp.diff(log_rho, x[i], x[j])
                     - sum(chris[k][i][j] * sp.diff(log_rho, x[k]) for k in range(n)))
    ricci_mu = sp.simplify(ricci - hess)
    drift = [sp.simplify(sum(ginv[j, k] * sp.diff(log_rho, x[k]) for k in range(n))
                         - sum(ginv[i, k] * chris[j][i][k] for i in range(n) for k in range(n)))
             for j in range(n)]
    return ginv, chris, ricci, ricci_mu, drift


def check_roundtrip(text, expr, n):
    back = sp.sympify(text.replace("^", "**"), locals={f"x{i + 1}": X[i] for i in range(n)})
    rng = random.Random(7)
    for _ in range(5):
        pt = {X[i]: rng.uniform(0.6, 1.4) for i in range(n)}
        a, b = complex(back.evalf(subs=pt)), complex(sp.N(expr, subs=pt))
        if abs(a - b) > 1e-12 * max(1.0, abs(b)):
            raise AssertionError(f"round trip mismatch for {text}: {a} vs {b}")


x1, x2, x3 = X
phi = sp.Rational(3, 10) * sp.sin(x1) * sp.cos(x2)
r2 = x1**2 + x2**2

ENTRIES = [
    ("euclidean2", "cartesian", 2, sp.eye(2), 0, ([-2, -2], [2, 2]), "flat plane"),
    ("euclidean3", "cartesian", 3, sp.eye(3), 0, ([-2, -2, -2], [2, 2, 2]), "flat space"),
    ("sphere2_spherical", "spherical", 2, sp.diag(1, sp.sin(x1)**2), 0,
     ([0.2, -math.pi], [math.pi - 0.2, math.pi]), "unit sphere, polar angle x1 and azimuth x2"),
    ("sphere2_stereographic", "stereographic", 2, sp.eye(2) * 4 / (1 + r2)**2, 0,
     ([-2, -2], [2, 2]), "unit sphere, stereographic projection from the north pole"),
    ("hyperbolic_halfplane", "upper_halfplane", 2, sp.eye(2) / x2**2, 0,
     ([-2, 0.5], [2, 4]), "hyperbolic plane, curvature -1"),
    ("ou_gaussian1", "cartesian", 1, sp.eye(1), -x1**2 / 2, ([-3], [3]), "Ornstein-Uhlenbeck, standard Gaussian"),
    ("ou_gaussian2", "cartesian", 2, sp.eye(2), -(x1**2 + x2**2) / 2,
     ([-3, -3], [3, 3]), "Ornstein-Uhlenbeck, standard Gaussian"),
    ("torus_conformal", "periodic", 2, sp.eye(2) * sp.exp(2 * phi), sp.cos(x1) / 2 + sp.Rational(3, 10) * sp.sin(x2),
     ([0, 0], [2 * math.pi, 2 * math.pi]), "flat torus with conformal factor exp(0.6 sin x1 cos x2) and a density"),
]


def rust_str(s):
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def rust_list(items):
    return "&[" + ", ".join(items) + "]"


def rust_matrix(m, n, expr=True):
    rows = []
    for i in range(n):
        rows.append(rust_list([rust_str(render(m[i, j])) for j in range(n)]))
    return rust_list(rows)


def main():
    blocks = []
    for name, chart, n, metric, log_rho, (lo, hi), notes in ENTRIES:
        metric = sp.Matrix(metric)
        log_rho = sp.sympify(log_rho)
        ginv, chris, ricci, ricci_mu, drift = geometry(metric, log_rho, n)
        for m in (metric, ginv, ricci, ricci_mu):
            for e in m:
                check_roundtrip(render(e), e, n)
        for e in drift:
            check_roundtrip(render(e), e, n)
        flat = [chris[k][i][j] for k in range(n) for i in range(n) for j in range(n)]
        blocks.append(f"""    TruthRecord {{
        name: {rust_str(name)},
        chart: {rust_str(chart)},
        notes: {rust_str(notes)},
        dim: {n},
        cometric: {rust_matrix(ginv, n)},
        drift: {rust_list([rust_str(render(d)) for d in drift])},
        metric: {rust_matrix(metric, n)},
        log_rho: {rust_str(render(log_rho))},
        christoffels: {rust_list([rust_str(render(c)) for c in flat])},
        ricci: {rust_matrix(ricci, n)},
        ricci_mu: {rust_matrix(ricci_mu, n)},
        box_lo: {rust_list([repr(float(v)) for v in lo])},
        box_hi: {rust_list([repr(float(v)) for v in hi])},
    }},""")
    OUT.write_text(
        "// Generated by tools/derive_catalog.py; do not edit by hand.\n\n"
        "pub(crate) const RECORDS: &[TruthRecord] = &[\n" + "\n".join(blocks) + "\n];\n"
    )
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
