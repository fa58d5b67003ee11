'''
Verification reports: an ordered list of PASS / FAIL / UNVERIFIED entries.
'''

PASS = "PASS"
FAIL = "FAIL"
UNVERIFIED = "UNVERIFIED"


class Check():
    def __init__(self, name, status, detail="", key=None):
        self.name = name
        self.status = status
        self.detail = detail
        self.key = key

    def __repr__(self):
        where = f" {self.key}" if self.key is not None else ""
        return f"{self.status} {self.name}{where}" + (f": {self.detail}" if self.detail else "")


class Report():
    '''
    @title: what was verified
    @order: truncation order of the series comparisons
    @window: graded window of the vector spaces, when relevant
    '''

    def __init__(self, title, order=None, window=None):
        self.title = title
        self.order = order
        self.window = window
        self.checks = []

    def record(self, name, ok, detail="", key=None):
        self.checks.append(Check(name, PASS if ok else FAIL, "" if ok else detail, key))
        return ok

    def unverified(self, name, detail, key=None):
        self.checks.append(Check(name, UNVERIFIED, detail, key))

    def extend(self, other):
        self.checks.extend(other.checks)
        return self

    def __add__(self, other):
        merged = Report(f"{self.title} + {other.title}", self.order, self.window)
        merged.checks = self.checks + other.checks
        return merged

    @property
    def passed(self):
        return all(c.status != FAIL for c in self.checks)

    @property
    def first_failure(self):
        return next((c for c in self.checks if c.status == FAIL), None)

    def count(self, status):
        return sum(c.status == status for c in self.checks)

    def summary(self):
        lines = [f"{self.title}: {PASS if self.passed else FAIL}"
                 f" ({self.count(PASS)} passed, {self.count(FAIL)} failed, {self.count(UNVERIFIED)} unverified)"]
        if self.order is not None:
            lines.append(f"  truncation order {self.order}")
        if self.window is not None:
            lines.append(f"  graded window {self.window}")
        failure = self.first_failure
        if failure is not None:
            lines.append(f"  first failure: {failure}")
        lines.extend(f"  {c}" for c in self.checks if c.status == UNVERIFIED)
        return "\n".join(lines)

    def as_dict(self):
        return {
            "title": self.title,
            "passed": self.passed,
            "order": self.order,
            "window": self.window,
            "checks": [{"name": c.name, "status": c.status, "key": repr(c.key) if c.key is not None else None,
                        "detail": c.detail} for c in self.checks],
        }
