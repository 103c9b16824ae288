"""Pass/fail bookkeeping shared by the validation routines."""

from dataclasses import dataclass, field


@dataclass
class CheckResult:
    check: str
    passed: bool
    residual: float
    detail: dict = field(default_factory=dict)

    def line(self):
        out = "check={} pass={} residual={:.6e}".format(
            self.check, "true" if self.passed else "false", float(self.residual)
        )
        # scalar extras are appended as key=value
        for key, val in self.detail.get("extras", {}).items():
            out += f" {key}={val:.6f}" if isinstance(val, float) else f" {key}={val}"
        return out


@dataclass
class ValidationReport:
    """Ordered collection of :class:`CheckResult` entries.

    A report is truthy when every contained check passed.
    """

    results: list = field(default_factory=list)

    def add(self, check, passed, residual, **detail):
        res = CheckResult(check, bool(passed), float(residual), detail)
        self.results.append(res)
        return res

    def extend(self, other):
        self.results.extend(other.results)
        return self

    @property
    def ok(self):
        return all(r.passed for r in self.results)

    def __bool__(self):
        return self.ok

    def __getitem__(self, name):
        for r in self.results:
            if r.check == name:
                return r
        raise KeyError(name)

    def __contains__(self, name):
        return any(r.check == name for r in self.results)

    def failures(self):
        return [r for r in self.results if not r.passed]

    def lines(self):
        return [r.line() for r in self.results]

    def __str__(self):
        return "\n".join(self.lines())
