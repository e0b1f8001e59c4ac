"""Collects the one-line verdicts printed by the acceptance suite."""

LINES = []


def record(number: int, ok, detail: str) -> str:
    verdict = {True: "PASS", False: "FAIL", None: "SKIP"}[ok]
    line = f"[{verdict}] criterion {number}: {detail}"
    LINES.append(line)
    print(line)
    return line
