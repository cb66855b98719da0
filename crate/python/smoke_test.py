#!/usr/bin/env python3
"""Smoke test for the twistlab_py extension module.

Build and stage the module first:

    cargo build -p twistlab-py --release
    cp target/release/libtwistlab_py.so python/twistlab_py.so

then run `python3 python/smoke_test.py` from the repository root.
"""

import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import twistlab_py as tl


def approx(a, b, tol):
    return abs(a - b) <= tol


def main():
    # eta products: Δ has a(2) = −24
    delta_coeffs = tl.eta_expansion({1: 24}, 5)
    assert delta_coeffs[1] == "-24", delta_coeffs

    f = tl.Newform("11a")
    assert f.weight == 2 and f.level == 11
    assert f.lam(1) == 1.0
    assert approx(f.lam(2), -2.0 / math.sqrt(2.0), 1e-12)
    assert f.root_number() == 1

    g = tl.CharacterGroup(101)
    assert g.generator == 2
    eps = g.gauss()
    assert all(approx(abs(e), 1.0, 1e-10) for e in eps[1:])
    kl2 = g.kloosterman(2)
    assert max(abs(v) for v in kl2) <= 2.0 + 1e-9

    fam = tl.central_values(f, 101)
    vals = fam.values()
    assert len(vals) == 99
    # conjugate symmetry of the family at s = 1/2
    for j in range(1, 100):
        v, w = vals[j - 1], vals[99 - j - 1 + 1 - 1] if False else vals[(100 - j) - 1]
        assert abs(v.conjugate() - w) <= 1e-9 * max(1.0, abs(v)), j

    # modular symbols against the family through Birch–Stevens
    resid = tl.birch_stevens_residual("11a", 101)
    assert resid < 1e-8, resid

    syms, mean, variance = tl.modular_symbols("11a", 101)
    assert len(syms) == 100
    assert abs(mean.imag) < 1e-9
    assert variance > 0

    computed, predicted = tl.first_moment(f, 101, 1, 0)
    assert approx(predicted.real, 1.0, 1e-15)
    assert abs(computed - predicted) < 0.5

    lhs, rhs, diff = tl.voronoi_check("11a", 5, 13, 100.0)
    assert diff < 1e-6, (lhs, rhs, diff)

    print("twistlab_py smoke test: all checks passed")


if __name__ == "__main__":
    main()
