#!/usr/bin/env python3
"""Solve an MPS file with HiGHS and write a name/value solution file.

Usage: highs_solve.py MODEL.mps SOLUTION.sol

The solution file holds one "name value" line per column plus comment lines
read back by respan:

    # status: Optimal
    # solve_seconds: 0.12
    # iterations: 345
    # peak_memory_bytes: 1234567

highspy is used when importable; otherwise the model is parsed here and
handed to scipy's HiGHS wrapper. Peak memory is the growth of this process's
maximum resident set while reading and solving, which excludes the
interpreter's own footprint.
"""

import math
import os
import resource
import sys
import time


def maxrss_bytes():
    return resource.getrusage(resource.RUSAGE_SELF).ru_maxrss * 1024


def fmt(v):
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return repr(float(v))


def solve_highspy(path):
    import highspy

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("primal_feasibility_tolerance", 1e-9)
    h.setOptionValue("dual_feasibility_tolerance", 1e-9)
    threads = os.environ.get("REsPAN_THREADS")
    if threads and threads.isdigit() and int(threads) > 0:
        h.setOptionValue("threads", int(threads))
    start = time.perf_counter()
    if h.readModel(path) != highspy.HighsStatus.kOk:
        raise RuntimeError("HiGHS could not read " + path)
    h.run()
    elapsed = time.perf_counter() - start

    ms = h.getModelStatus()
    S = highspy.HighsModelStatus
    if ms == S.kOptimal:
        status = "Optimal"
    elif ms == S.kInfeasible:
        status = "Infeasible"
    elif ms in (S.kUnbounded, S.kUnboundedOrInfeasible):
        status = "Unbounded"
    elif ms in (S.kIterationLimit, S.kTimeLimit):
        status = "IterationLimit"
    else:
        status = "NumericalFailure"

    info = h.getInfo()
    iterations = int(info.simplex_iteration_count) + int(info.ipm_iteration_count)
    lp = h.getLp()
    names = list(lp.col_names_)
    values = list(h.getSolution().col_value) if status == "Optimal" else []
    return status, elapsed, iterations, names, values


def parse_mps(path):
    """Minimal free-format MPS reader covering what respan exports."""
    rows = {}  # name -> type
    row_order = []
    obj_row = None
    cols = {}
    col_order = []
    coef = []  # (row, col, value)
    rhs, ranges, bounds = {}, {}, {}
    section = None
    with open(path) as fh:
        for raw in fh:
            if not raw.strip() or raw.startswith("*"):
                continue
            if not raw[0].isspace():
                section = raw.split()[0]
                if section == "ENDATA":
                    break
                continue
            f = raw.split()
            if section == "ROWS":
                kind, name = f[0], f[1]
                if kind == "N" and obj_row is None:
                    obj_row = name
                rows[name] = kind
                if kind != "N":
                    row_order.append(name)
            elif section == "COLUMNS":
                if len(f) >= 3 and f[1] == "'MARKER'":
                    continue
                col = f[0]
                if col not in cols:
                    cols[col] = len(col_order)
                    col_order.append(col)
                for i in range(1, len(f) - 1, 2):
                    coef.append((f[i], col, float(f[i + 1])))
            elif section in ("RHS", "RANGES"):
                target = rhs if section == "RHS" else ranges
                for i in range(1, len(f) - 1, 2):
                    target[f[i]] = float(f[i + 1])
            elif section == "BOUNDS":
                kind, col = f[0], f[2]
                val = float(f[3]) if len(f) > 3 else 0.0
                lo, hi = bounds.get(col, (0.0, math.inf))
                if kind == "UP":
                    hi = val
                elif kind == "LO":
                    lo = val
                elif kind == "FX":
                    lo = hi = val
                elif kind == "FR":
                    lo, hi = -math.inf, math.inf
                elif kind == "MI":
                    lo = -math.inf
                elif kind == "PL":
                    hi = math.inf
                bounds[col] = (lo, hi)
    return rows, row_order, obj_row, cols, col_order, coef, rhs, ranges, bounds


def solve_scipy(path):
    import numpy as np
    from scipy.optimize import linprog
    from scipy.sparse import coo_matrix

    start = time.perf_counter()
    rows, row_order, obj_row, cols, col_order, coef, rhs, ranges, bounds = parse_mps(path)
    n = len(col_order)
    row_index = {r: i for i, r in enumerate(row_order)}
    c = np.zeros(n)
    ri, ci, vi = [], [], []
    for r, col, v in coef:
        if r == obj_row:
            c[cols[col]] += v
        elif r in row_index:
            ri.append(row_index[r])
            ci.append(cols[col])
            vi.append(v)
    m = len(row_order)
    lo = np.full(m, -np.inf)
    hi = np.full(m, np.inf)
    for i, r in enumerate(row_order):
        b = rhs.get(r, 0.0)
        kind = rows[r]
        if kind == "E":
            lo[i] = hi[i] = b
            if r in ranges:
                rg = ranges[r]
                if rg > 0:
                    hi[i] = b + rg
                else:
                    lo[i] = b + rg
        elif kind == "G":
            lo[i] = b
            if r in ranges:
                hi[i] = b + abs(ranges[r])
        elif kind == "L":
            hi[i] = b
            if r in ranges:
                lo[i] = b - abs(ranges[r])
    A = coo_matrix((vi, (ri, ci)), shape=(m, n)).tocsr()
    eq = np.isfinite(lo) & np.isfinite(hi) & (lo == hi)
    up = np.isfinite(hi) & ~eq
    dn = np.isfinite(lo) & ~eq
    from scipy.sparse import vstack

    A_ub = vstack([A[up], -A[dn]]) if (up.any() or dn.any()) else None
    b_ub = np.concatenate([hi[up], -lo[dn]]) if A_ub is not None else None
    A_eq = A[eq] if eq.any() else None
    b_eq = lo[eq] if eq.any() else None
    bnds = [bounds.get(col, (0.0, math.inf)) for col in col_order]
    bnds = [(None if math.isinf(a) else a, None if math.isinf(b) else b) for a, b in bnds]
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=bnds, method="highs",
                  options={"primal_feasibility_tolerance": 1e-9, "dual_feasibility_tolerance": 1e-9})
    elapsed = time.perf_counter() - start
    status = {0: "Optimal", 1: "IterationLimit", 2: "Infeasible", 3: "Unbounded"}.get(res.status,
                                                                                      "NumericalFailure")
    values = list(res.x) if status == "Optimal" else []
    return status, elapsed, int(getattr(res, "nit", 0) or 0), col_order, values


def main(argv):
    if len(argv) != 3:
        sys.stderr.write("usage: highs_solve.py MODEL.mps SOLUTION.sol\n")
        return 2
    mps, sol = argv[1], argv[2]
    try:
        import highspy  # noqa: F401

        backend = solve_highspy
    except ImportError:
        backend = solve_scipy

    base = maxrss_bytes()
    try:
        status, elapsed, iterations, names, values = backend(mps)
    except Exception as exc:  # reported through the exit code
        sys.stderr.write("highs_solve: %s\n" % exc)
        return 1
    peak = max(0, maxrss_bytes() - base)

    lines = [
        "# status: %s" % status,
        "# solve_seconds: %r" % elapsed,
        "# iterations: %d" % iterations,
        "# peak_memory_bytes: %d" % peak,
    ]
    lines.extend("%s %s" % (name, fmt(v)) for name, v in zip(names, values))
    with open(sol, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
