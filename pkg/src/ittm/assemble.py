"""Compile flowcharts over fixed tape cells into ITTM programs.

A flowchart is given by an ``expand(key)`` function returning one of
:class:`Test`, :class:`Set` or :class:`Stop` for every node key.  Node
positions are fixed cells, so the compiler tracks the head statically and
inserts the walking states in between.  The node used at head 0 for the start
state and the one entered at limit stages are named explicitly.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Hashable

from .vm import TRIPLES, Program

INPUT, SCRATCH, OUTPUT = 0, 1, 2


@dataclass(frozen=True)
class Test:
    tape: int
    pos: int
    if0: Hashable
    if1: Hashable


@dataclass(frozen=True)
class Set:
    tape: int
    pos: int
    bit: int
    next: Hashable


@dataclass(frozen=True)
class Stop:
    pass


def compile_flowchart(expand: Callable[[Hashable], object], start_key, limit_key) -> Program:
    names: dict = {(start_key, 0): "start", (limit_key, 0): "limit"}
    rows: dict = {}
    todo = [(start_key, 0), (limit_key, 0)]

    def state_for(key, head):
        if isinstance(expand(key), Stop):
            return "halt"
        if (key, head) not in names:
            names[key, head] = f"q{len(names) - 2}"
            todo.append((key, head))
        return names[key, head]

    def toward(head, key):
        node = expand(key)
        if isinstance(node, Stop) or node.pos >= head:
            return "R", head + 1
        return "L", head - 1

    while todo:
        key, head = todo.pop()
        name = names[key, head]
        node = expand(key)
        for t in TRIPLES:
            if node.pos != head:
                move = "R" if node.pos > head else "L"
                nxt = state_for(key, head + (1 if move == "R" else -1))
                rows[name, t] = (t, move, nxt)
                continue
            if isinstance(node, Test):
                target = node.if1 if t[node.tape] == "1" else node.if0
                write = t
            else:
                target = node.next
                write = t[:node.tape] + str(node.bit) + t[node.tape + 1:]
            move, new_head = toward(head, target)
            rows[name, t] = (write, move, state_for(target, new_head))
    return Program(rows)
