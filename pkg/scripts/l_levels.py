"""Build the first L-levels and report node counts, edge counts and build time."""
import argparse
import time
from dataclasses import dataclass

from ittm.hsets import L_level, build_L_level, collapse_structure


@dataclass
class Config:
    top: int = 5


def main(cfg: Config):
    print("n  elements  edges  seconds")
    level = L_level(0)
    for n in range(cfg.top + 1):
        if n:
            t0 = time.perf_counter()
            level = build_L_level(level)
            dt = time.perf_counter() - t0
        else:
            dt = 0.0
        size = len(collapse_structure(level))
        print(f"{n}  {size:8d}  {len(level.edges):5d}  {dt:7.3f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--top", type=int, default=Config.top)
    main(Config(ap.parse_args().top))
