#!/usr/bin/env python3
"""Classify a gallery of (task, failure) pairs and tabulate how the
semi-analytic tail tracks each regime's prediction across a threshold sweep.
"""
import argparse
import math
import sys

import numpy as np

import restart_tails as rt

PAIRS = [
    ("exponential(rate=1.0)", "exponential(rate=1.0)"),
    ("exponential(rate=2.0)", "exponential(rate=1.0)"),
    ("pareto(index=2.0, scale=1.0)", "pareto(index=1.0, scale=2.0)"),
    ("pareto(index=2.0, scale=1.0)", "pareto(index=2.0, scale=2.0)"),
    ("pareto(index=2.0, scale=1.0)", "exponential(rate=1.0)"),
    ("exponential(rate=1.0)", "pareto(index=1.0, scale=2.0)"),
    ("weibull(shape=2.0, scale=1.0)", "weibull(shape=2.0, scale=2.0)"),
    ("uniform(lower=0.0, upper=1.0)", "exponential(rate=1.0)"),
]


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--x-min", type=float, default=1e2)
    ap.add_argument("--x-max", type=float, default=1e4)
    ap.add_argument("--points", type=int, default=3)
    ap.add_argument("-o", "--output", default="-")
    args = ap.parse_args()

    out = sys.stdout if args.output == "-" else open(args.output, "w", encoding="utf-8")
    try:
        out.write("task,failure,case,mode,theta,x,engine,prediction,comparison\n")
        for task_text, failure_text in PAIRS:
            task = rt.parse_distribution(task_text)
            failure = rt.parse_distribution(failure_text)
            case = rt.classify(task, failure)
            for x in np.geomspace(args.x_min, args.x_max, args.points):
                est = rt.semi_analytic_tail(task, failure, x)
                pred = rt.evaluate_regime_with(case, task, failure, x)
                if case.mode is rt.AsymptoticMode.SHARP:
                    comparison = est.point / pred
                elif case.mode is rt.AsymptoticMode.LOGARITHMIC:
                    comparison = -math.log(est.point) / rt.log_asymptote(case, x) \
                        if x > math.exp(math.e) else math.nan
                else:
                    comparison = math.log(-math.log(est.point)) / rt.log_asymptote(case, x)
                out.write(f"{task_text!r},{failure_text!r},{case.case.value},"
                          f"{case.mode.value},{case.theta!r},{x!r},{est.point!r},"
                          f"{pred!r},{comparison!r}\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
