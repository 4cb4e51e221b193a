"""Collects one PASS/FAIL line per acceptance criterion for the terminal summary."""
RESULTS: dict = {}


def record(number: int, title: str, value: float, tol: float, ok: bool, detail: str = "") -> str:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {title}: value={value:.3e} tol={tol:.1e}"
    if detail:
        line += f" ({detail})"
    RESULTS[(number, title)] = line
    print(line)
    return line
