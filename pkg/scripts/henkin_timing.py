"""Time the exactly-two completion at a few step counts and report the term model."""
import argparse
import time
from dataclasses import dataclass

from ittm.henkin import exactly_two_oracle, henkin_run, term_model


@dataclass
class Config:
    steps: tuple = (50, 100, 200, 500)
    repeats: int = 1


def main(cfg: Config):
    print("steps  commitments  witnesses  classes  seconds")
    for n in cfg.steps:
        best = float("inf")
        for _ in range(cfg.repeats):
            t0 = time.perf_counter()
            oracle = exactly_two_oracle()
            state = henkin_run(oracle, n)
            tm = term_model(state, oracle)
            best = min(best, time.perf_counter() - t0)
        print(f"{n:5d}  {len(state.commitments):11d}  {len(state.witnesses):9d}  "
              f"{tm.structure.size:7d}  {best:7.2f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--steps", type=int, nargs="+", default=list(Config.steps))
    ap.add_argument("--repeats", type=int, default=Config.repeats)
    a = ap.parse_args()
    main(Config(tuple(a.steps), a.repeats))
