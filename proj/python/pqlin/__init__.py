"""Linearizability checking for concurrent priority-queue traces.

Traces, orders and programs use the JSON formats of the ``pqlin`` CLI; pass
them as text, or as Python objects (lists of action dicts, order dicts) which
are serialized first.
"""

import json

from . import _core
from ._core import BoundExceeded, CapExceeded, Error, ParseError, impl_names

__all__ = [
    "BoundExceeded", "CapExceeded", "Error", "ParseError",
    "check", "oracle", "monitor", "impl_names", "count_schedules", "run_schedule", "fuzz",
]


def _trace(trace):
    if isinstance(trace, str):
        return trace
    return "".join(json.dumps(a) + "\n" for a in trace)


def _doc(obj):
    if obj is None or isinstance(obj, str):
        return obj
    return json.dumps(obj)


def check(trace, order=None, proj_bound=12):
    return _core.check(_trace(trace), _doc(order), proj_bound)


def oracle(trace, order=None, cap=12):
    return _core.oracle(_trace(trace), _doc(order), cap)


def monitor(trace, order=None):
    return _core.monitor(_trace(trace), _doc(order))


def count_schedules(program):
    return _core.count_schedules(_doc(program))


def run_schedule(program, schedule):
    return _core.run_schedule(_doc(program), list(schedule))


def fuzz(program, seed, count):
    return _core.fuzz(_doc(program), seed, count)
