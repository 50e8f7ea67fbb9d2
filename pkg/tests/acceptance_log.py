"""Shared record of acceptance results, printed in the pytest terminal summary."""

RESULTS = {}


def record(n: int, title: str, ok: bool, detail: str = "") -> bool:
    line = f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {title}" + (f"  ({detail})" if detail else "")
    RESULTS[n] = line
    print(line)
    return ok
