#!/usr/bin/env python3
"""DIMACS solver for the external backend. Prints s/v lines, exits 10 or 20."""

import sys


def read_cnf(path):
    nvars, clauses, cur = 0, [], []
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line or line[0] in "c%":
                continue
            if line[0] == "p":
                nvars = int(line.split()[2])
                continue
            for tok in line.split():
                lit = int(tok)
                if lit == 0:
                    clauses.append(cur)
                    cur = []
                else:
                    cur.append(lit)
    return nvars, clauses


def pysat_solve(nvars, clauses):
    from pysat.solvers import Minisat22

    with Minisat22(bootstrap_with=clauses) as s:
        if not s.solve():
            return None
        model = set(s.get_model() or [])
    return [v if v in model else -v for v in range(1, nvars + 1)]


def dpll(nvars, clauses):
    assign = {}

    def value(lit):
        v = assign.get(abs(lit))
        return None if v is None else (v if lit > 0 else not v)

    def search():
        while True:
            unit = None
            for c in clauses:
                vals = [value(l) for l in c]
                if True in vals:
                    continue
                free = [l for l, v in zip(c, vals) if v is None]
                if not free:
                    return False
                if len(free) == 1:
                    unit = free[0]
                    break
            if unit is None:
                break
            assign[abs(unit)] = unit > 0
        for v in range(1, nvars + 1):
            if v not in assign:
                saved = dict(assign)
                assign[v] = True
                if search():
                    return True
                assign.clear()
                assign.update(saved)
                assign[v] = False
                if search():
                    return True
                assign.clear()
                assign.update(saved)
                return False
        return True

    if not search():
        return None
    return [v if assign.get(v, False) else -v for v in range(1, nvars + 1)]


def main():
    nvars, clauses = read_cnf(sys.argv[1])
    if any(len(c) == 0 for c in clauses):
        model = None
    else:
        try:
            model = pysat_solve(nvars, clauses)
        except ImportError:
            model = dpll(nvars, clauses)
    if model is None:
        print("s UNSATISFIABLE")
        return 20
    print("s SATISFIABLE")
    print("v " + " ".join(map(str, model)) + " 0")
    return 10


if __name__ == "__main__":
    sys.exit(main())
