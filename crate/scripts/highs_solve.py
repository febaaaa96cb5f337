#!/usr/bin/env python3
"""Solve an LP file with HiGHS and write `objective <v>` and `<var> <value>` lines.

Usage with the cutting-plane loop:

    lotforge export g.inst --cuts --lp-solver-cmd 'python3 scripts/highs_solve.py {lp} {sol}'
"""

import sys

import highspy


def main() -> int:
    if len(sys.argv) != 3:
        print("usage: highs_solve.py <model.lp> <solution.txt>", file=sys.stderr)
        return 1
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    if h.readModel(sys.argv[1]) != highspy.HighsStatus.kOk:
        print(f"cannot read {sys.argv[1]}", file=sys.stderr)
        return 2
    h.run()
    if h.getModelStatus() != highspy.HighsModelStatus.kOptimal:
        print(f"solver status: {h.modelStatusToString(h.getModelStatus())}", file=sys.stderr)
        return 3
    lp = h.getLp()
    values = h.getSolution().col_value
    with open(sys.argv[2], "w") as out:
        out.write(f"objective {h.getInfo().objective_function_value!r}\n")
        for name, value in zip(lp.col_names_, values):
            out.write(f"{name} {value!r}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
