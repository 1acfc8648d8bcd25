"""Smoke test of the `growup` Python extension.

Build and install first:
    pip install --no-build-isolation ./crates/py
then run:
    python3 python/smoke_test.py
"""

import math
import tempfile
from pathlib import Path

import growup


def check(cond, what):
    if not cond:
        raise AssertionError(what)
    print(f"ok  {what}")


def main():
    p = growup.ProblemParams(1.0, 1.0, 3, 2.0)
    check(p.N == 3 and p.L == 2.0 and p.gamma == 1.0, "ProblemParams getters")
    check(p == growup.ProblemParams(1.0, 1.0, 3, 2.0), "ProblemParams equality")
    try:
        growup.ProblemParams(-1.0, 1.0, 3, 1.0)
        check(False, "invalid params rejected")
    except ValueError:
        check(True, "invalid params raise ValueError")

    ex = growup.exponents(2.0, 3)
    check(ex["exponents"]["p0"] == 2.0 and abs(ex["exponents"]["pS"] - 10.0) < 1e-12, "exponents(m=2, N=3): p0 = 2, pS = 10")

    reg = p.regime()
    check(reg["rate_law"] == "exp(lambda0 t)" and 0 < reg["lambda0"] < 1, "regime(1, 1, 3, 2): exponential rate with lambda0")
    check(growup.classify_regime(0.7, 0.5, 3)["region"] == "D", "classify_regime(0.7, 0.5, 3) = D")

    check(abs(growup.critical_length(3) - math.pi / 2) < 1e-8, "L*(3) = pi/2")
    check(abs(growup.lambda0(2.0, 3) - reg["lambda0"]) < 1e-15, "lambda0(L=2, N=3)")
    check(abs(growup.bessel_j(0.5, 1.0) - math.sqrt(2 / math.pi) * math.sin(1.0)) < 1e-14, "J_1/2(1)")

    st = growup.stationary_profile(3, 1.0, points=11, r_max=1.0)
    r, w = st["rows"][5][0], st["rows"][5][1]
    check(abs(w / (math.sin(r) / r) - 1) < 1e-8, "stationary profile = sin r / r inside B_1")

    ss = growup.selfsim_profile(0.5, 3, 2.5)
    check(abs(ss["summary"]["far_field_exponent"] + 4.0) < 0.08, "self-similar far-field exponent -2/(1-m)")

    t = [10 ** (k / 20) for k in range(0, 81)]
    u = [3.0 * x**2.5 for x in t]
    check(abs(growup.fit(t, u, 10.0, 1e4)["parameter"] - 2.5) < 1e-10, "power fit recovers 2.5")
    check(abs(growup.duhamel_sequence(0.5)["sigma"][-1] - 2.0) < 1e-8, "Duhamel sigma limit 1/(1-p)")

    cfg = growup.default_config()
    cfg.update({"params": {"m": 1.0, "p": 1.0, "N": 2, "L": 1.0}, "grid": {"r_max": 60.0, "cells": 300},
                "t_max": 50.0, "reaction": False})
    res = growup.simulate(cfg)
    check(res.passed and res.t_end == 50.0, f"heat-kernel run passes ({res!r})")
    check(len(res.t) == len(res.sup_norm) > 10, "series exported")

    with tempfile.TemporaryDirectory() as d:
        report = growup.simulate_to(cfg, d)
        files = sorted(f.name for f in Path(d).iterdir())
        check(files == ["meta.json", "report.json", "series.csv", "snapshots.csv"], "simulate_to writes the four files")
        check(report["pass"], "report pass flag")

    check("Lstar" in growup.recipes(), "recipe list")
    check(growup.verify("Lstar")["pass"], "verify Lstar passes")

    sw = growup.sweep({"table": "lambda0", "N": 3, "L": [2.0, 5.0, 20.0]}, workers=2)
    check(sw["summary"]["monotone_increasing"] and len(sw["rows"]) == 3, "lambda0 sweep monotone")
    empty = growup.sweep({"table": "regime", "N": 3})
    check(empty["rows"] == [] and empty["columns"][0] == "cell", "empty sweep has header only")
    print("smoke test passed")


if __name__ == "__main__":
    main()
