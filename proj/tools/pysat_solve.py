#!/usr/bin/env python3
"""DIMACS front end for the solvers bundled with PySAT.

Prints competition-style output ("s SATISFIABLE" and "v ... 0" lines) so the
strips11 solver driver can use it like any native solver.

    pysat_solve.py [--solver kissat404] file.cnf
"""
import argparse
import sys

from pysat.formula import CNF
from pysat.solvers import Solver


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--solver", default="cadical195")
    ap.add_argument("cnf")
    args = ap.parse_args()

    formula = CNF(from_file=args.cnf)
    with Solver(name=args.solver, bootstrap_with=formula.clauses) as s:
        sat = s.solve()
        if not sat:
            print("s UNSATISFIABLE")
            return 20
        model = s.get_model()
    assigned = {abs(l): l for l in model}
    lits = [assigned.get(v, -v) for v in range(1, formula.nv + 1)]
    print("s SATISFIABLE")
    for i in range(0, len(lits), 20):
        print("v " + " ".join(map(str, lits[i:i + 20])))
    print("v 0")
    return 10


if __name__ == "__main__":
    sys.exit(main())
