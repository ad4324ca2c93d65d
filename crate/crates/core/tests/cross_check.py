"""Solve an MPS file with an external MILP solver and print the objective.

Output is one line: `<solver> <status> <objective>`. HiGHS is used when
highspy is installed, otherwise scipy's milp on a minimal free-MPS reader.
"""

import sys


def solve_highs(path):
    import highspy

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("mip_rel_gap", 1e-9)
    h.setOptionValue("mip_abs_gap", 1e-12)
    h.readModel(path)
    h.run()
    status = h.modelStatusToString(h.getModelStatus())
    return "highs", status, h.getInfo().objective_function_value


def read_mps(path):
    rows, obj_row = {}, None
    cols, integer = {}, set()
    rhs, bounds = {}, {}
    section, in_int = None, False
    with open(path) as f:
        for line in f:
            if not line.strip() or line.startswith("*"):
                continue
            if not line[0].isspace():
                section = line.split()[0]
                continue
            parts = line.split()
            if section == "ROWS":
                kind, name = parts
                if kind == "N":
                    obj_row = name
                else:
                    rows[name] = kind
            elif section == "COLUMNS":
                if len(parts) >= 3 and parts[1] == "'MARKER'":
                    in_int = parts[2] == "'INTORG'"
                    continue
                col = parts[0]
                entry = cols.setdefault(col, {})
                if in_int:
                    integer.add(col)
                for k in range(1, len(parts), 2):
                    entry[parts[k]] = float(parts[k + 1])
            elif section == "RHS":
                for k in range(1, len(parts), 2):
                    rhs[parts[k]] = float(parts[k + 1])
            elif section == "BOUNDS":
                kind, col = parts[0], parts[2]
                lo, hi = bounds.get(col, (0.0, None))
                v = float(parts[3]) if len(parts) > 3 else None
                if kind == "UP":
                    hi = v
                elif kind == "LO":
                    lo = v
                elif kind == "FX":
                    lo = hi = v
                elif kind == "FR":
                    lo, hi = None, None
                elif kind == "MI":
                    lo = None
                elif kind == "PL":
                    hi = None
                elif kind == "BV":
                    lo, hi = 0.0, 1.0
                bounds[col] = (lo, hi)
    return rows, obj_row, cols, integer, rhs, bounds


def solve_scipy(path):
    import numpy as np
    from scipy.optimize import Bounds, LinearConstraint, milp
    from scipy.sparse import lil_matrix

    rows, obj_row, cols, integer, rhs, bounds = read_mps(path)
    names = list(cols)
    row_names = list(rows)
    ri = {r: i for i, r in enumerate(row_names)}
    a = lil_matrix((len(row_names), len(names)))
    c = np.zeros(len(names))
    for j, col in enumerate(names):
        for r, v in cols[col].items():
            if r == obj_row:
                c[j] = v
            else:
                a[ri[r], j] = v
    lo_r = np.full(len(row_names), -np.inf)
    hi_r = np.full(len(row_names), np.inf)
    for r, kind in rows.items():
        b = rhs.get(r, 0.0)
        i = ri[r]
        if kind in ("L", "E"):
            hi_r[i] = b
        if kind in ("G", "E"):
            lo_r[i] = b
    lo = np.array([(bounds.get(n, (0.0, None))[0]) for n in names], dtype=object)
    hi = np.array([(bounds.get(n, (0.0, None))[1]) for n in names], dtype=object)
    lo = np.array([-np.inf if v is None else v for v in lo], dtype=float)
    hi = np.array([np.inf if v is None else v for v in hi], dtype=float)
    integrality = np.array([1 if n in integer else 0 for n in names])
    res = milp(
        c,
        constraints=LinearConstraint(a.tocsr(), lo_r, hi_r),
        bounds=Bounds(lo, hi),
        integrality=integrality,
        options={"mip_rel_gap": 1e-9},
    )
    offset = -rhs.get(obj_row, 0.0)
    status = "Optimal" if res.status == 0 else res.message
    return "scipy", status, (res.fun + offset) if res.status == 0 else float("nan")


def main():
    path = sys.argv[1]
    try:
        solver, status, value = solve_highs(path)
    except ImportError:
        solver, status, value = solve_scipy(path)
    print(f"{solver} {status.replace(' ', '_')} {value!r}")


if __name__ == "__main__":
    main()
