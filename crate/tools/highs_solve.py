#!/usr/bin/env python3
"""Solve an LP/MILP file with HiGHS and write `name value` lines.

Usage: highs_solve.py MODEL.lp SOLUTION.out

Exits 0 when an optimal or feasible solution was written, 1 otherwise.
"""
import sys

import highspy


def main() -> int:
    if len(sys.argv) != 3:
        print(__doc__, file=sys.stderr)
        return 2
    model_path, out_path = sys.argv[1], sys.argv[2]
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("mip_rel_gap", 0.0)
    h.setOptionValue("mip_abs_gap", 1e-10)
    if h.readModel(model_path) != highspy.HighsStatus.kOk:
        print(f"cannot read {model_path}", file=sys.stderr)
        return 1
    h.run()
    status = h.getModelStatus()
    if status != highspy.HighsModelStatus.kOptimal and h.getInfo().primal_solution_status != 2:
        print(f"no solution: {h.modelStatusToString(status)}", file=sys.stderr)
        return 1
    values = h.getSolution().col_value
    lp = h.getLp()
    with open(out_path, "w") as f:
        for name, value in zip(lp.col_names_, values):
            f.write(f"{name} {value!r}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
