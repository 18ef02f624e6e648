"""Shared test configuration and the acceptance-criteria summary hook."""

from hypothesis import settings

settings.register_profile("lab", deadline=None)
settings.load_profile("lab")

ACCEPTANCE: dict = {}


def record_criterion(num: int, title: str, passed: bool, detail: str = "") -> None:
    ACCEPTANCE[num] = {"title": title, "passed": passed, "detail": detail}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        entry = ACCEPTANCE[num]
        status = "PASS" if entry["passed"] else "FAIL"
        line = f"criterion {num}: {status} - {entry['title']}"
        if entry["detail"]:
            line += f" [{entry['detail']}]"
        terminalreporter.write_line(line)
