#!/usr/bin/env python3
"""Solve an MPS file with HiGHS and write a '<column> <value>' assignment.

Usage: highs_solve.py MODEL.mps ASSIGNMENT.txt [TIME_LIMIT_S]
Exit codes: 0 optimal, 2 solved without proof, 3 no solution, 4 highspy missing.
"""

import sys

try:
    import highspy
except ImportError:
    sys.exit(4)


def main() -> int:
    if len(sys.argv) < 3:
        print(__doc__, file=sys.stderr)
        return 1
    model_path, out_path = sys.argv[1], sys.argv[2]
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("mip_rel_gap", 1e-9)
    h.setOptionValue("random_seed", 0)
    h.setOptionValue("threads", 1)
    if len(sys.argv) > 3:
        h.setOptionValue("time_limit", float(sys.argv[3]))
    if h.readModel(model_path) != highspy.HighsStatus.kOk:
        print(f"cannot read {model_path}", file=sys.stderr)
        return 1
    h.run()
    status = h.getModelStatus()
    info = h.getInfo()
    if info.primal_solution_status == 0:
        return 3
    lp = h.getLp()
    values = h.getSolution().col_value
    with open(out_path, "w") as out:
        for name, value in zip(lp.col_names_, values):
            out.write(f"{name} {value!r}\n")
    print(f"{h.modelStatusToString(status)} objective={info.objective_function_value!r}")
    return 0 if status == highspy.HighsModelStatus.kOptimal else 2


if __name__ == "__main__":
    sys.exit(main())
