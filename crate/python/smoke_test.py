"""Smoke test for the tronquee_py extension module.

Build and install it first, for example:

    pip install maturin
    maturin build --release -m crates/python/Cargo.toml -o dist
    pip install dist/tronquee_py-*.whl

then run ``python python/smoke_test.py``.
"""

import cmath
import math
import os
import tempfile

import tronquee_py as tq


def close(a, b, tol=1e-12):
    return abs(a - b) <= tol * (1 + abs(b))


def main():
    eq = tq.Equation.p3i("1", "-1")
    assert eq.family == "p3i"
    print(eq)

    # u = 1, U = -1 - 2/x terminates
    a, big_a = eq.exact_coefficients(0, 6)
    assert a == ["1"] + ["0"] * 6, a
    assert big_a[:2] == ["-1", "-2"] and set(big_a[2:]) == {"0"}, big_a
    assert eq.residual_order(0, 6) is None

    generic = tq.Equation.p3i("1/3", "-2/5")
    assert generic.residual_order(0, 12) >= 12
    fa, _ = generic.coefficients(0, 12, backend="f64")
    ea, _ = generic.coefficients(0, 12)
    assert all(close(x, y) for x, y in zip(fa, ea))

    b = generic.branch(1)
    assert b["A0"] == "1" and not b["trivial"], b
    assert close(generic.coefficients(1, 0)[0][0], 1j)
    lo, hi = generic.sector(0, 0)
    assert close(lo, -math.pi / 2) and close(hi, math.pi / 2)

    jac = tq.Equation.p4("1/3", "1/5").jacobian(1)
    lam = complex(*jac["closed_form"][0])
    assert close(abs(lam), 2 * math.sqrt(3) / 3)

    # the linear P4 solution u = -2x, U = 0
    p4 = tq.Equation.p4("1", "0")
    x0 = cmath.rect(1.0, math.pi / 4)
    du, dU = p4.rhs(x0, -2 * x0, 0j)
    assert close(du, -2) and abs(dU) < 1e-14
    traj = p4.integrate(-2 * x0, 0j, math.pi / 4, 1.0, r1=4.0, tol=1e-12)
    assert traj["status"]["kind"] == "completed", traj["status"]
    last = traj["samples"][-1]
    assert close(complex(*last["u"]), -2 * complex(*last["x"]), 1e-10)

    patch = tq.Equation.p3i("1/3", "-2/5").tronquee(0, r0=20.0, rays=3, radii=4)
    assert patch["pole_free"] and not patch["incomplete"], patch["poles"]
    assert len(patch["grid"]) == 12

    try:
        tq.Equation.p3i("1", "-1").branch(9)
    except ValueError as e:
        print("rejected:", e)
    else:
        raise AssertionError("branch 9 accepted")

    with tempfile.TemporaryDirectory() as d:
        code = tq.run_cli(["eigs", "--quiet", "--out", d])
        assert code == 0 and os.path.exists(os.path.join(d, "eigs.json"))
    assert tq.run_cli(["bogus"]) == 2

    print("tronquee_py", tq.__version__, "smoke test passed")


if __name__ == "__main__":
    main()
