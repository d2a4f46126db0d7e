import pytest

_KEY = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record ``(criterion, passed, detail)`` lines for the end-of-run summary."""
    lines = request.config.stash.setdefault(_KEY, [])

    def record(criterion: int, checks: dict[str, bool], detail: str = "") -> bool:
        ok = all(checks.values())
        failed = [name for name, good in checks.items() if not good]
        text = f"criterion {criterion:>2}: {'PASS' if ok else 'FAIL'}"
        if failed:
            text += f" (failed: {', '.join(failed)})"
        if detail:
            text += f" | {detail}"
        lines.append((criterion, text))
        print(text)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, text in sorted(lines):
            terminalreporter.write_line(text)
