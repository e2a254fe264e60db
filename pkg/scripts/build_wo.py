"""Regenerate the shipped well-order decider program."""
from pathlib import Path

from ittm.vm import format_program
from ittm.wellorder import build_wo_program

HEADER = """\
# Well-order decider for relations on {0,1,2,3} coded on the input tape.
# Generated by scripts/build_wo.py; edit the flowchart there, not this file.
# Output cell 0 is 1 for a well-order and 0 otherwise.
"""

if __name__ == "__main__":
    target = Path(__file__).resolve().parents[1] / "src" / "ittm" / "programs" / "wo.itm"
    target.write_text(HEADER + format_program(build_wo_program()))
    print(f"wrote {target}")
