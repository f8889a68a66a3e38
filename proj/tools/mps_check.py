#!/usr/bin/env python3
"""Re-solves dumped MPS files with scipy/HiGHS and compares optima.

usage: mps_check.py DIR  (DIR holds *.mps and expected.txt from mps_dump)
"""
import sys
from pathlib import Path

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, linprog, milp
from scipy.sparse import csr_matrix

REL_TOL = 1e-6


def read_mps(path):
    rows, senses, obj_row = {}, [], None
    cols, cost, entries, integer = {}, [], [], []
    rhs, bounds = {}, {}
    offset = 0.0
    section, in_int = None, False
    for raw in Path(path).read_text().splitlines():
        if not raw.strip() or raw.startswith("*"):
            continue
        if not raw.startswith(" "):
            section = raw.split()[0]
            continue
        f = raw.split()
        if section == "ROWS":
            if f[0] == "N":
                obj_row = f[1]
            else:
                rows[f[1]] = len(senses)
                senses.append(f[0])
        elif section == "COLUMNS":
            if len(f) >= 3 and f[1] == "'MARKER'":
                in_int = f[2] == "'INTORG'"
                continue
            name = f[0]
            if name not in cols:
                cols[name] = len(cost)
                cost.append(0.0)
                integer.append(in_int)
            j = cols[name]
            for r, v in zip(f[1::2], f[2::2]):
                if r == obj_row:
                    cost[j] += float(v)
                else:
                    entries.append((rows[r], j, float(v)))
        elif section == "RHS":
            for r, v in zip(f[1::2], f[2::2]):
                if r == obj_row:
                    offset = -float(v)
                else:
                    rhs[rows[r]] = float(v)
        elif section == "BOUNDS":
            kind, name = f[0], f[2]
            val = float(f[3]) if len(f) > 3 else None
            lo, hi = bounds.get(name, (0.0, np.inf))
            if kind == "FX":
                lo = hi = val
            elif kind == "LO":
                lo = val
            elif kind == "UP":
                hi = val
            elif kind == "MI":
                lo = -np.inf
            elif kind == "PL":
                hi = np.inf
            elif kind == "FR":
                lo, hi = -np.inf, np.inf
            bounds[name] = (lo, hi)
    n, m = len(cost), len(senses)
    r, c, v = zip(*entries) if entries else ((), (), ())
    A = csr_matrix((v, (r, c)), shape=(m, n))
    b = np.array([rhs.get(i, 0.0) for i in range(m)])
    lo_row = np.where([s in ("G", "E") for s in senses], b, -np.inf)
    hi_row = np.where([s in ("L", "E") for s in senses], b, np.inf)
    lo = np.zeros(n)
    hi = np.full(n, np.inf)
    for name, (l, h) in bounds.items():
        lo[cols[name]], hi[cols[name]] = l, h
    return np.array(cost), A, lo_row, hi_row, lo, hi, np.array(integer), offset


def close(a, b):
    return abs(a - b) <= REL_TOL * max(1.0, abs(b))


def main(directory):
    d = Path(directory)
    failures = 0
    for line in (d / "expected.txt").read_text().splitlines():
        name, *want = line.split()
        cost, A, rlo, rhi, lo, hi, integer, offset = read_mps(d / f"{name}.mps")
        ub_rows = np.isfinite(rhi)
        lb_rows = np.isfinite(rlo)
        eq = ub_rows & lb_rows & (rlo == rhi)
        A_ub = np.vstack([A[ub_rows & ~eq].toarray(), -A[lb_rows & ~eq].toarray()])
        b_ub = np.concatenate([rhi[ub_rows & ~eq], -rlo[lb_rows & ~eq]])
        lp = linprog(cost, A_ub=A_ub if len(b_ub) else None, b_ub=b_ub if len(b_ub) else None,
                     A_eq=A[eq].toarray() if eq.any() else None, b_eq=rlo[eq] if eq.any() else None,
                     bounds=list(zip(lo, [None if np.isinf(h) else h for h in hi])), method="highs")
        ok = lp.status == 0 and close(lp.fun + offset, float(want[0]))
        msg = f"{name}: lp scipy {lp.fun + offset:.10g} ours {float(want[0]):.10g}"
        if len(want) > 1:
            res = milp(cost, constraints=LinearConstraint(A, rlo, rhi), integrality=integer.astype(int),
                       bounds=Bounds(lo, hi), options={"mip_rel_gap": 0.0})
            ok = ok and res.status == 0 and close(res.fun + offset, float(want[1]))
            msg += f"; mip scipy {res.fun + offset:.10g} ours {float(want[1]):.10g}"
        print(("ok   " if ok else "FAIL ") + msg)
        failures += not ok
    print(f"{failures} mismatches")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1]))
